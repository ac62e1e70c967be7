#pragma once

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gscat/types.hpp"

namespace gscat {

namespace detail {

inline const std::vector<std::string>& ply_field_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n{"x", "y", "z"};
        for (int i = 0; i < 3; ++i) n.push_back("f_dc_" + std::to_string(i));
        for (int i = 0; i < 45; ++i) n.push_back("f_rest_" + std::to_string(i));
        n.push_back("opacity");
        for (int i = 0; i < 3; ++i) n.push_back("scale_" + std::to_string(i));
        for (int i = 0; i < 4; ++i) n.push_back("rot_" + std::to_string(i));
        return n;
    }();
    return names;
}

inline void scatter_field(Gaussian3D& g, int field, float v) {
    if (field < 3) {
        g.mean[field] = v;
    } else if (field < 6) {
        g.sh_dc[field - 3] = v;
    } else if (field < 51) {
        g.sh_rest[field - 6] = v;
    } else if (field == 51) {
        g.opacity_logit = v;
    } else if (field < 55) {
        g.log_scale[field - 52] = v;
    } else {
        g.rotation[field - 55] = v;
    }
}

inline float gather_field(const Gaussian3D& g, int field) {
    if (field < 3) return g.mean[field];
    if (field < 6) return g.sh_dc[field - 3];
    if (field < 51) return g.sh_rest[field - 6];
    if (field == 51) return g.opacity_logit;
    if (field < 55) return g.log_scale[field - 52];
    return g.rotation[field - 55];
}

}  // namespace detail

/// Load a binary-little-endian PLY checkpoint. The vertex element must carry
/// the standard layout (x,y,z, f_dc_0..2, f_rest_0..44, opacity, scale_0..2,
/// rot_0..3); extra float properties such as normals are ignored. Values are
/// stored as-is: opacity stays a logit and scales stay logs.
inline std::vector<Gaussian3D> load_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("ply: cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || line != "ply") throw IoError("ply: not a PLY file: " + path);

    std::size_t vertex_count = 0;
    bool in_vertex_element = false;
    bool format_seen = false;
    std::vector<std::string> props;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment" || tok.empty()) continue;
        if (tok == "format") {
            std::string fmt, ver;
            ls >> fmt >> ver;
            if (fmt != "binary_little_endian")
                throw IoError("ply: unsupported format: " + fmt);
            format_seen = true;
        } else if (tok == "element") {
            std::string name;
            std::size_t n = 0;
            ls >> name >> n;
            if (name != "vertex") throw IoError("ply: unsupported element: " + name);
            vertex_count = n;
            in_vertex_element = true;
        } else if (tok == "property") {
            if (!in_vertex_element) throw IoError("ply: property outside vertex element");
            std::string type, name;
            ls >> type >> name;
            if (type == "list") throw IoError("ply: list properties are not supported");
            if (type != "float" && type != "float32")
                throw IoError("ply: unsupported property type: " + type);
            props.push_back(name);
        } else if (tok == "end_header") {
            break;
        } else {
            throw IoError("ply: unexpected header token: " + tok);
        }
    }
    if (!format_seen) throw IoError("ply: missing format line");

    std::unordered_map<std::string, int> prop_index;
    for (std::size_t i = 0; i < props.size(); ++i) prop_index.emplace(props[i], int(i));

    const auto& names = detail::ply_field_names();
    std::vector<int> src_index(names.size());
    for (std::size_t f = 0; f < names.size(); ++f) {
        auto it = prop_index.find(names[f]);
        if (it == prop_index.end()) throw IoError("ply: missing required field: " + names[f]);
        src_index[f] = it->second;
    }

    std::streamoff payload_start = in.tellg();
    std::size_t stride = props.size() * 4;
    std::vector<char> row(stride);
    std::vector<Gaussian3D> out;
    out.reserve(vertex_count);
    for (std::size_t i = 0; i < vertex_count; ++i) {
        in.read(row.data(), std::streamsize(stride));
        if (std::size_t(in.gcount()) != stride) {
            std::streamoff at = payload_start + std::streamoff(i * stride) + in.gcount();
            throw IoError("ply: truncated payload at byte " + std::to_string(at) + " (expected " +
                          std::to_string(payload_start + std::streamoff(vertex_count * stride)) +
                          ")");
        }
        Gaussian3D g;
        for (std::size_t f = 0; f < names.size(); ++f) {
            float v;
            std::memcpy(&v, row.data() + std::size_t(src_index[f]) * 4, 4);
            detail::scatter_field(g, int(f), v);
        }
        out.push_back(g);
    }
    return out;
}

/// Write the canonical checkpoint layout, float32 little-endian.
inline void write_ply(const std::string& path, const std::vector<Gaussian3D>& gaussians) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("ply: cannot write " + path);

    const auto& names = detail::ply_field_names();
    out << "ply\nformat binary_little_endian 1.0\nelement vertex " << gaussians.size() << "\n";
    for (const auto& n : names) out << "property float " << n << "\n";
    out << "end_header\n";

    std::vector<char> row(names.size() * 4);
    for (const Gaussian3D& g : gaussians) {
        for (std::size_t f = 0; f < names.size(); ++f) {
            float v = detail::gather_field(g, int(f));
            std::memcpy(row.data() + f * 4, &v, 4);
        }
        out.write(row.data(), std::streamsize(row.size()));
    }
    if (!out) throw IoError("ply: write failed: " + path);
}

}  // namespace gscat
