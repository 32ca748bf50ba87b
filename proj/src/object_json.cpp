#include "json_util.hpp"
#include "qdtraj/object_model.hpp"

namespace qdtraj {

using detail::pose_from_json;
using detail::pose_to_json;
using detail::vec3_from_json;
using detail::vec3_to_json;

nlohmann::json object_to_json(const ArticulatedObject& object)
{
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& part : object.parts()) {
        nlohmann::json boxes = nlohmann::json::array();
        for (const auto& box : part.boxes)
            boxes.push_back({{"half_extents", vec3_to_json(box.half_extents)}, {"local_pose", pose_to_json(box.local_pose)}});
        parts.push_back({{"name", part.name}, {"boxes", boxes}});
    }
    nlohmann::json joints = nlohmann::json::array();
    for (const auto& joint : object.joints()) {
        joints.push_back({
            {"name", joint.name},
            {"kind", std::string(to_string(joint.kind))},
            {"parent", object.parts()[joint.parent].name},
            {"child", object.parts()[joint.child].name},
            {"origin", pose_to_json(joint.origin)},
            {"axis", vec3_to_json(joint.axis)},
            {"limits", {joint.limits.lower, joint.limits.upper}},
        });
    }
    return {
        {"model_version", kModelVersion},
        {"name", object.name()},
        {"base_pose", pose_to_json(object.base_pose())},
        {"parts", parts},
        {"joints", joints},
    };
}

ArticulatedObject object_from_json(const nlohmann::json& doc)
{
    try {
        if (doc.at("model_version").get<int>() != kModelVersion)
            throw Error(ErrorCode::malformed_document, "unsupported model_version " + doc.at("model_version").dump());

        std::vector<RigidPart> parts;
        for (const auto& p : doc.at("parts")) {
            RigidPart part{p.at("name").get<std::string>(), {}};
            for (const auto& b : p.at("boxes"))
                part.boxes.push_back({vec3_from_json(b.at("half_extents")), pose_from_json(b.at("local_pose"))});
            parts.push_back(std::move(part));
        }
        auto index_of = [&](const std::string& name) {
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (parts[i].name == name)
                    return i;
            }
            throw Error(ErrorCode::malformed_tree, "joint references unknown part '" + name + "'");
        };

        std::vector<ObjectJoint> joints;
        for (const auto& j : doc.at("joints")) {
            ObjectJoint joint;
            joint.name = j.at("name").get<std::string>();
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "revolute")
                joint.kind = JointKind::revolute;
            else if (kind == "prismatic")
                joint.kind = JointKind::prismatic;
            else if (kind == "fixed")
                joint.kind = JointKind::fixed;
            else
                throw Error(ErrorCode::unsupported_joint, "joint '" + joint.name + "' has unsupported kind '" + kind + "'");
            joint.parent = index_of(j.at("parent").get<std::string>());
            joint.child = index_of(j.at("child").get<std::string>());
            joint.origin = pose_from_json(j.at("origin"));
            joint.axis = vec3_from_json(j.at("axis"));
            joint.limits = {j.at("limits").at(0).get<double>(), j.at("limits").at(1).get<double>()};
            joints.push_back(std::move(joint));
        }
        return ArticulatedObject(doc.at("name").get<std::string>(), pose_from_json(doc.at("base_pose")), std::move(parts), std::move(joints));
    }
    catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::malformed_document, std::string("object model: ") + e.what());
    }
}

} // namespace qdtraj
