#pragma once

#include <string>
#include <vector>

#include "oscillakdv/field.hpp"

namespace oscillakdv {

enum class RunStatus { completed, blowup_detected, nan_detected };

inline std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::blowup_detected: return "blowup_detected";
        case RunStatus::nan_detected: return "nan_detected";
    }
    return "?";
}

// Per-check-time scalar diagnostics. energy uses the mean coefficient of the
// run's g (the conserved quantity of the limiting flow when g is constant).
struct ScalarRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double h1_norm = 0.0;
    double g_value = 0.0;
};

struct Snapshot {
    double t = 0.0;
    Field field; // physical representation
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<ScalarRecord> scalars;
    RunStatus status = RunStatus::completed;
    double event_time = 0.0;   // detection time when status != completed
    double initial_h1 = 0.0;   // growth-detector baseline
    std::vector<std::string> warnings;

    const Snapshot& front() const { return snapshots.front(); }
    const Snapshot& back() const { return snapshots.back(); }

    std::vector<double> snapshot_times() const {
        std::vector<double> ts;
        ts.reserve(snapshots.size());
        for (const auto& s : snapshots) ts.push_back(s.t);
        return ts;
    }
};

} // namespace oscillakdv
