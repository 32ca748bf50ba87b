#include "qdtraj/error.hpp"
#include "qdtraj/object_model.hpp"

namespace qdtraj {

namespace {

void require_positive(const Vec3& v, const char* what)
{
    if (!v.allFinite() || !(v.array() > 0.0).all())
        throw Error(ErrorCode::invalid_argument, std::string("experimental box: ") + what + " must be positive");
}

} // namespace

ArticulatedObject make_experimental_box(const ExperimentalBoxSpec& spec)
{
    require_positive(spec.body_size, "body size");
    require_positive(spec.door_size, "door size");
    require_positive(spec.door_handle_size, "door handle size");
    require_positive(spec.tray_size, "tray size");
    require_positive(spec.tray_handle_size, "tray handle size");
    if (!(spec.hinge_upper > 0.0) || !(spec.slide_travel > 0.0))
        throw Error(ErrorCode::invalid_argument, "experimental box: joint ranges must be positive");
    if (!(spec.door_handle_inset > 0.0 && spec.door_handle_inset < spec.door_size.y()))
        throw Error(ErrorCode::invalid_argument, "experimental box: handle inset must lie within the door width");

    const Vec3& body = spec.body_size;
    const Vec3& door = spec.door_size;
    const Vec3& handle = spec.door_handle_size;
    const Vec3& tray = spec.tray_size;
    const Vec3& lip = spec.tray_handle_size;

    RigidPart frame{"frame", {{body / 2.0, Pose::translation({0.0, 0.0, body.z() / 2.0})}}};

    // Door frame sits on the hinge line (outer face, +y edge); the closed door extends toward -y.
    RigidPart door_part{"door",
        {
            {door / 2.0, Pose::translation({-door.x() / 2.0, -door.y() / 2.0, 0.0})},
            {handle / 2.0, Pose::translation({handle.x() / 2.0, -(door.y() - spec.door_handle_inset), 0.0})},
        }};

    RigidPart tray_part{"tray",
        {
            {tray / 2.0, Pose::identity()},
            {lip / 2.0, Pose::translation({tray.x() / 2.0 + lip.x() / 2.0, 0.0, -tray.z() / 2.0 + lip.z() / 2.0})},
        }};

    ObjectJoint hinge;
    hinge.name = "hinge0";
    hinge.kind = JointKind::revolute;
    hinge.parent = 0;
    hinge.child = 1;
    hinge.origin = Pose::translation({body.x() / 2.0 + door.x(), door.y() / 2.0, body.z() / 2.0});
    hinge.axis = Vec3::UnitZ();
    hinge.limits = {0.0, spec.hinge_upper};

    ObjectJoint slider;
    slider.name = "slider0";
    slider.kind = JointKind::prismatic;
    slider.parent = 0;
    slider.child = 2;
    slider.origin = Pose::translation({0.0, 0.0, body.z() + tray.z() / 2.0});
    slider.axis = Vec3::UnitX();
    slider.limits = {0.0, spec.slide_travel};

    return ArticulatedObject("experimental_box", spec.base_pose, {frame, door_part, tray_part}, {hinge, slider});
}

} // namespace qdtraj
