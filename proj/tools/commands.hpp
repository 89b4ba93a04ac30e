#pragma once

#include "ptint/io.hpp"

namespace ptint::cli {

// Each command writes into cfg.output and returns the process exit status:
// 0 when every enabled check passed, 1 when a check failed, 2 on rejected input.
int cmd_spectrum(const io::RunConfig& cfg);
int cmd_solve(const io::RunConfig& cfg);
int cmd_branch_scan(const io::RunConfig& cfg, int workers);
int cmd_crosscheck(const io::RunConfig& cfg);
int cmd_probe_geometry(const io::RunConfig& cfg);
/// With an empty profile path the linear-mode Green function (q = 1) is verified.
int cmd_verify(const io::RunConfig& cfg, const std::string& profile_path);

}  // namespace ptint::cli
