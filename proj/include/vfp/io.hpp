#pragma once

// On-disk formats: VFPG/VFPP binary dumps and the diagnostics CSV stream.
// Binary layouts are little-endian; doubles are written bit-exact.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vfp/errors.hpp"
#include "vfp/grid.hpp"

namespace vfp {

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
inline void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
inline void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

inline std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
inline std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
inline double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

static_assert(sizeof(double) == 8, "f64 layout assumed");

} // namespace detail

inline void write_grid(const std::string& path, const PhaseGrid& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open for write: " + path);
    os.write("VFPG", 4);
    detail::put_u32(os, 1u);
    detail::put_u64(os, g.nx);
    detail::put_u64(os, g.nv);
    detail::put_f64(os, g.x_min);
    detail::put_f64(os, g.x_max);
    detail::put_f64(os, g.v_min);
    detail::put_f64(os, g.v_max);
    os.write(reinterpret_cast<const char*>(g.values.data()),
             std::streamsize(g.values.size() * sizeof(double)));
    if (!os) throw config_error("write failed: " + path);
}

inline PhaseGrid read_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "VFPG", 4) != 0) throw config_error("bad VFPG magic in " + path);
    const auto version = detail::get_u32(is);
    if (version != 1u) throw config_error("unsupported VFPG version in " + path);
    PhaseGrid g;
    g.nx = detail::get_u64(is);
    g.nv = detail::get_u64(is);
    g.x_min = detail::get_f64(is);
    g.x_max = detail::get_f64(is);
    g.v_min = detail::get_f64(is);
    g.v_max = detail::get_f64(is);
    g.values.resize(g.nx * g.nv);
    is.read(reinterpret_cast<char*>(g.values.data()), std::streamsize(g.values.size() * sizeof(double)));
    if (!is) throw config_error("truncated VFPG file: " + path);
    return g;
}

inline void write_profile(const std::string& path, const Profile1D& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open for write: " + path);
    os.write("VFPP", 4);
    detail::put_u32(os, 1u);
    detail::put_u64(os, p.n());
    detail::put_f64(os, p.x_min);
    detail::put_f64(os, p.x_max);
    os.write(reinterpret_cast<const char*>(p.values.data()),
             std::streamsize(p.values.size() * sizeof(double)));
    if (!os) throw config_error("write failed: " + path);
}

inline Profile1D read_profile(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "VFPP", 4) != 0) throw config_error("bad VFPP magic in " + path);
    const auto version = detail::get_u32(is);
    if (version != 1u) throw config_error("unsupported VFPP version in " + path);
    Profile1D p;
    const auto n = detail::get_u64(is);
    p.x_min = detail::get_f64(is);
    p.x_max = detail::get_f64(is);
    p.values.resize(n);
    is.read(reinterpret_cast<char*>(p.values.data()), std::streamsize(n * sizeof(double)));
    if (!is) throw config_error("truncated VFPP file: " + path);
    return p;
}

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* diag_csv_header() {
    return "t,mass,entropy,diss_lhs,diss_rhs,mean_x,mean_v,var_x,var_v,cov_xv,l2mu_dist,l1,l2,linf";
}

inline std::string diag_csv_row(const DiagRecord& r) {
    std::string s;
    const double cols[14] = {r.t,      r.mass,  r.entropy, r.diss_lhs, r.diss_rhs,
                             r.mean_x, r.mean_v, r.var_x,   r.var_v,    r.cov_xv,
                             r.l2mu_dist, r.l1, r.l2, r.linf};
    for (int k = 0; k < 14; ++k) {
        if (k) s += ',';
        s += format_g17(cols[k]);
    }
    return s;
}

inline void write_diag_csv(const std::string& path, const std::vector<DiagRecord>& recs) {
    std::ofstream os(path, std::ios::binary);  // binary: byte-identical newlines
    if (!os) throw config_error("cannot open for write: " + path);
    os << diag_csv_header() << "\n";
    for (const auto& r : recs) os << diag_csv_row(r) << "\n";
}

} // namespace vfp
