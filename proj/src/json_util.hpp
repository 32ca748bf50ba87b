#pragma once

#include "qdtraj/error.hpp"
#include "qdtraj/se3.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <string>

namespace qdtraj::detail {

inline nlohmann::json vec3_to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const nlohmann::json& j)
{
    if (!j.is_array() || j.size() != 3)
        throw Error(ErrorCode::malformed_document, "expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline nlohmann::json quat_to_json(const Quat& q)
{
    const auto c = to_wxyz(canonical(q));
    return nlohmann::json::array({c[0], c[1], c[2], c[3]});
}

inline Quat quat_from_json(const nlohmann::json& j)
{
    if (!j.is_array() || j.size() != 4)
        throw Error(ErrorCode::malformed_document, "expected a 4-element [w,x,y,z] array");
    return from_wxyz({j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()});
}

inline nlohmann::json pose_to_json(const Pose& p)
{
    return {{"position", vec3_to_json(p.position)}, {"orientation", quat_to_json(p.orientation)}};
}

inline Pose pose_from_json(const nlohmann::json& j)
{
    return {vec3_from_json(j.at("position")), quat_from_json(j.at("orientation"))};
}

} // namespace qdtraj::detail
