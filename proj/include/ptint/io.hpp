#pragma once
// Files: profile CSV, JSON records, the sectioned key-value run config and
// the versions stamp.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptint/model.hpp"
#include "ptint/radial_ode.hpp"
#include "ptint/shooting.hpp"
#include "ptint/variational.hpp"
#include "ptint/verify.hpp"

namespace ptint::io {

using json = nlohmann::ordered_json;

// ---- profiles --------------------------------------------------------------

/// Columns r,u,du,f with 17 significant digits.
void write_profile_csv(const std::filesystem::path& path, const RadialProfile& profile);
std::string profile_csv(const RadialProfile& profile);
/// Reads r,u,du,f back. params/q/a are left for the caller.
RadialProfile read_profile_csv(const std::filesystem::path& path);

// ---- json ------------------------------------------------------------------

json to_json(const Params& params);
json to_json(const Outcome& outcome);
/// Without the sampled profile.
json to_json(const BranchPoint& point);
json to_json(const VerificationReport& report);
json to_json(const FunctionalReport& report);
json to_json(const MinimizeResult& result);
json to_json(const GeometryReport& report);

/// Doubles that are not finite become null.
json number(double x);

/// Writes via a temporary file and a rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);

// ---- run config ------------------------------------------------------------

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line) : std::runtime_error(format(what, line)), line_(line) {}
    int line() const { return line_; }

private:
    static std::string format(const std::string& what, int line)
    {
        return line > 0 ? "config line " + std::to_string(line) + ": " + what : what;
    }
    int line_;
};

/// [section] headers, "key = value" lines, '#' comments.
struct ConfigText {
    std::map<std::string, KeyValues> sections;
    std::map<std::string, std::map<std::string, int>> lines;  ///< where each key was set

    static ConfigText parse(const std::string& text);
    std::string str() const;
};

struct RunConfig {
    Params params;
    ShootControls shoot;
    VarGridOptions var_grid;
    MinimizeOptions minimize;
    VerifyTolerances verify;
    std::string mode = "ground";  ///< solve: ground | nodal | fixed-q
    int k = 0;
    double q = 1.0;
    int q_points = 7;   ///< branch-scan
    double q_lo = 0.1;
    double q_hi = 3.0;
    int directions = 64;  ///< probe-geometry
    std::uint64_t seed = 1;
    double crosscheck_sup_tol = 1e-3;
    double crosscheck_action_tol = 1e-4;
    std::string output = "out";

    /// Validates everything; errors carry the line of the offending key.
    static RunConfig from_text(const ConfigText& text);
    ConfigText to_text() const;
};

RunConfig load_config(const std::filesystem::path& path);

/// Program, compiler, library and kernel versions, one "name: value" per line.
std::string versions_stamp();

}  // namespace ptint::io
