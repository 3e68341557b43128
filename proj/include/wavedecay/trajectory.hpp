#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavedecay/grid.hpp"

namespace wavedecay {

// ---------------------------------------------------------------------------
// Time-stamped sequence of perturbation snapshots plus solver metadata.
// times[0] = 0 holds the initial data; conserved_mass tracks int w dx.
// ---------------------------------------------------------------------------
struct Trajectory {
    std::vector<double> times;
    std::vector<GridFunction> snapshots;
    std::vector<double> conserved_mass;
    nlohmann::json solver_meta;

    void record(double t, const GridFunction& w) {
        if (!times.empty() && !(t > times.back()))
            throw Error("Trajectory: times must be strictly increasing");
        times.push_back(t);
        snapshots.push_back(w);
        conserved_mass.push_back(trapezoid(w));
    }

    size_t size() const { return times.size(); }

    double mass_drift() const {
        if (conserved_mass.empty()) return 0.0;
        double worst = 0.0;
        for (double m : conserved_mass)
            worst = std::max(worst, std::abs(m - conserved_mass.front()));
        return worst;
    }
};

// Persistence: directory with meta.json and snap_<index>.csv per snapshot,
// deterministic naming for reproducible diffs.
inline std::string snapshot_name(size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%04zu.csv", index);
    return buf;
}

inline void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json meta = traj.solver_meta;
    meta["times"] = traj.times;
    meta["conserved_mass"] = traj.conserved_mass;
    meta["snapshot_count"] = traj.snapshots.size();
    {
        std::ofstream out(dir / "meta.json");
        if (!out) throw Error("write_trajectory: cannot open meta.json");
        out << meta.dump(2) << "\n";
    }
    for (size_t i = 0; i < traj.snapshots.size(); ++i)
        write_csv(traj.snapshots[i], dir / snapshot_name(i));
}

inline Trajectory read_trajectory(const std::filesystem::path& dir) {
    std::ifstream in(dir / "meta.json");
    if (!in) throw Error("read_trajectory: cannot open meta.json in " + dir.string());
    nlohmann::json meta = nlohmann::json::parse(in);
    Trajectory traj;
    traj.solver_meta = meta;
    traj.times = meta.at("times").get<std::vector<double>>();
    traj.conserved_mass = meta.at("conserved_mass").get<std::vector<double>>();
    const size_t count = meta.at("snapshot_count").get<size_t>();
    for (size_t i = 0; i < count; ++i)
        traj.snapshots.push_back(read_csv(dir / snapshot_name(i)));
    if (traj.snapshots.size() != traj.times.size())
        throw Error("read_trajectory: snapshot/time count mismatch");
    return traj;
}

}  // namespace wavedecay
