#include "riverlv/bundle.hpp"

#include "riverlv/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace riverlv {

std::string format_number(double x) {
    if (x == 0.0) return "0";
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

BundleWriter::BundleWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void BundleWriter::write_text(const std::string& name, const std::string& content) const {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
    f << content;
    if (!f) throw ConfigError("write failed for '" + (dir_ / name).string() + "'");
}

void BundleWriter::write_json(const std::string& name, const nlohmann::json& j) const {
    write_text(name, j.dump(2) + "\n");
}

void BundleWriter::write_norms(const Trajectory& traj) const {
    std::string s = "t,norm_u_inf,norm_v_inf,mass_u,mass_v\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        s += format_number(traj.times[k]) + ',' + format_number(traj.norm_u[k]) + ',' + format_number(traj.norm_v[k]) +
             ',' + format_number(traj.mass_u[k]) + ',' + format_number(traj.mass_v[k]) + '\n';
    }
    write_text("norms.csv", s);
}

void BundleWriter::write_fields(const std::string& name, const Grid& grid, const std::vector<std::string>& headers,
                                const std::vector<const Field*>& fields) const {
    std::string s = grid.dim == 1 ? "x" : "x,y";
    for (const auto& h : headers) s += ',' + h;
    s += '\n';
    for (std::size_t k = 0; k < grid.size(); ++k) {
        s += format_number(grid.x(k));
        if (grid.dim == 2) s += ',' + format_number(grid.y(k));
        for (const Field* f : fields) s += ',' + format_number((*f)[k]);
        s += '\n';
    }
    write_text(name, s);
}

void BundleWriter::write_snapshot(const Snapshot& snap) const {
    write_fields("snapshot_" + format_number(snap.t) + ".csv", snap.u.grid, {"u", "v"}, {&snap.u, &snap.v});
}

}  // namespace riverlv
