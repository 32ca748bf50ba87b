#include "qdtraj/error.hpp"
#include "qdtraj/object_model.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qdtraj {

namespace {

namespace pt = boost::property_tree;

const std::set<std::string, std::less<>> kIgnoredSilently{"<xmlattr>", "<xmlcomment>", "visual"};

std::string attr(const pt::ptree& node, const std::string& name, const std::string& fallback = "")
{
    return node.get<std::string>("<xmlattr>." + name, fallback);
}

Vec3 parse_vec3(const std::string& text, const std::string& what)
{
    std::istringstream in(text);
    Vec3 v;
    if (!(in >> v.x() >> v.y() >> v.z()))
        throw Error(ErrorCode::malformed_document, "cannot parse 3-vector for " + what + ": '" + text + "'");
    std::string rest;
    if (in >> rest)
        throw Error(ErrorCode::malformed_document, "trailing data in 3-vector for " + what + ": '" + text + "'");
    return v;
}

Pose parse_origin(const pt::ptree& parent, const std::string& what)
{
    const auto origin = parent.get_child_optional("origin");
    if (!origin)
        return Pose::identity();
    return Pose::from_xyz_rpy(parse_vec3(attr(*origin, "xyz", "0 0 0"), what + " origin xyz"),
        parse_vec3(attr(*origin, "rpy", "0 0 0"), what + " origin rpy"));
}

void warn_unknown(const pt::ptree& node, const std::set<std::string, std::less<>>& known, const std::string& where,
    std::vector<std::string>& warnings)
{
    for (const auto& [tag, child] : node) {
        if (known.count(tag) == 0 && kIgnoredSilently.count(tag) == 0)
            warnings.push_back("ignored element <" + tag + "> in " + where);
    }
}

RigidPart parse_link(const pt::ptree& link, std::vector<std::string>& warnings)
{
    RigidPart part;
    part.name = attr(link, "name");
    if (part.name.empty())
        throw Error(ErrorCode::malformed_document, "link without a name");
    warn_unknown(link, {"collision"}, "link '" + part.name + "'", warnings);

    for (const auto& [tag, collision] : link) {
        if (tag != "collision")
            continue;
        warn_unknown(collision, {"origin", "geometry"}, "collision of link '" + part.name + "'", warnings);
        const auto geometry = collision.get_child_optional("geometry");
        if (!geometry)
            throw Error(ErrorCode::malformed_document, "collision without geometry in link '" + part.name + "'");
        for (const auto& [shape, shape_node] : *geometry) {
            if (shape == "<xmlattr>" || shape == "<xmlcomment>")
                continue;
            if (shape != "box")
                throw Error(ErrorCode::unsupported_geometry, "link '" + part.name + "' uses <" + shape + "> geometry; only <box> is supported");
            const Vec3 size = parse_vec3(attr(shape_node, "size"), "box size of link '" + part.name + "'");
            if (!(size.array() > 0.0).all())
                throw Error(ErrorCode::malformed_document, "box size must be positive in link '" + part.name + "'");
            part.boxes.push_back({size / 2.0, parse_origin(collision, "collision of link '" + part.name + "'")});
        }
    }
    if (part.boxes.empty())
        throw Error(ErrorCode::missing_geometry, "link '" + part.name + "' has no box collision geometry");
    return part;
}

} // namespace

UrdfParseResult parse_urdf(const std::string& xml)
{
    pt::ptree doc;
    try {
        std::istringstream in(xml);
        pt::read_xml(in, doc);
    }
    catch (const pt::xml_parser_error& e) {
        throw Error(ErrorCode::malformed_document, std::string("XML: ") + e.what());
    }
    const auto robot = doc.get_child_optional("robot");
    if (!robot)
        throw Error(ErrorCode::malformed_document, "missing <robot> root element");

    std::vector<std::string> warnings;
    warn_unknown(*robot, {"link", "joint"}, "robot", warnings);

    std::vector<RigidPart> parts;
    std::map<std::string, std::size_t> part_index;
    for (const auto& [tag, link] : *robot) {
        if (tag != "link")
            continue;
        parts.push_back(parse_link(link, warnings));
        if (!part_index.emplace(parts.back().name, parts.size() - 1).second)
            throw Error(ErrorCode::malformed_tree, "duplicate link '" + parts.back().name + "'");
    }

    std::vector<ObjectJoint> joints;
    for (const auto& [tag, node] : *robot) {
        if (tag != "joint")
            continue;
        ObjectJoint joint;
        joint.name = attr(node, "name");
        const std::string type = attr(node, "type");
        if (type == "revolute")
            joint.kind = JointKind::revolute;
        else if (type == "prismatic")
            joint.kind = JointKind::prismatic;
        else if (type == "fixed")
            joint.kind = JointKind::fixed;
        else
            throw Error(ErrorCode::unsupported_joint, "joint '" + joint.name + "' has unsupported type '" + type + "'");
        warn_unknown(node, {"origin", "axis", "limit", "parent", "child"}, "joint '" + joint.name + "'", warnings);

        auto lookup = [&](const char* which) {
            const std::string link = node.get<std::string>(std::string(which) + ".<xmlattr>.link", "");
            const auto it = part_index.find(link);
            if (it == part_index.end())
                throw Error(ErrorCode::malformed_tree, "joint '" + joint.name + "' " + which + " link '" + link + "' not found");
            return it->second;
        };
        joint.parent = lookup("parent");
        joint.child = lookup("child");
        joint.origin = parse_origin(node, "joint '" + joint.name + "'");

        if (joint.movable()) {
            Vec3 axis = Vec3::UnitX();
            if (const auto axis_node = node.get_child_optional("axis"))
                axis = parse_vec3(attr(*axis_node, "xyz", "1 0 0"), "axis of joint '" + joint.name + "'");
            if (!(axis.norm() > 0.0))
                throw Error(ErrorCode::malformed_document, "joint '" + joint.name + "' has a zero axis");
            joint.axis = axis.normalized();

            const auto limit = node.get_child_optional("limit");
            const auto lower = limit ? limit->get_optional<double>("<xmlattr>.lower") : boost::none;
            const auto upper = limit ? limit->get_optional<double>("<xmlattr>.upper") : boost::none;
            if (!lower || !upper)
                throw Error(ErrorCode::missing_limits, "movable joint '" + joint.name + "' needs <limit lower=.. upper=..>");
            joint.limits = {*lower, *upper};
        }
        joints.push_back(std::move(joint));
    }

    return {ArticulatedObject(attr(*robot, "name"), Pose::identity(), std::move(parts), std::move(joints)), std::move(warnings)};
}

UrdfParseResult load_urdf(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::io_failure, "cannot read URDF '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_urdf(buffer.str());
}

} // namespace qdtraj
