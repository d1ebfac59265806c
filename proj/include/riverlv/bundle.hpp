#pragma once

#include "riverlv/grid.hpp"
#include "riverlv/timestepper.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace riverlv {

// Shortest decimal string that reads back to the same double; -0 prints as 0.
std::string format_number(double x);

class BundleWriter {
public:
    explicit BundleWriter(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    void write_text(const std::string& name, const std::string& content) const;
    void write_json(const std::string& name, const nlohmann::json& j) const;
    // t, norm_u_inf, norm_v_inf, mass_u, mass_v
    void write_norms(const Trajectory& traj) const;
    // snapshot_<t>.csv with x[,y],u,v
    void write_snapshot(const Snapshot& snap) const;
    // Columns of equal length over the cells of one grid.
    void write_fields(const std::string& name, const Grid& grid, const std::vector<std::string>& headers,
                      const std::vector<const Field*>& fields) const;

private:
    std::filesystem::path dir_;
};

}  // namespace riverlv
