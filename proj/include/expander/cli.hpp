#pragma once

#include <cmath>
#include <string>

namespace expander::cli {

// Parsed command-line surface.  One flat record serves all subcommands; each
// reads the fields it documents and the modules validate values against their
// own preconditions before any work happens.
struct RunConfig {
    std::string subcommand;

    // curve family
    double d = 1.0;
    double s_max = 20.0;
    double step_tol = 1e-13;
    int samples = 40001;
    int flat_factors = 0;

    // spectral window
    double S = 16.0;
    int m = 4001;
    int k = 6;                 // how many eigenvalues to report
    std::string op = "drifted";

    // functional / audit parameters
    double alpha = 1.0;
    double beta = 1.0;
    int delta = 0;             // curvature power |H|^delta (volume subcommand)
    double grid_step = 1e-3;   // finite-difference step for identity residuals
    double a = 0.0;            // growth-fit coefficients |H| <= a|x| + b
    double b = 0.0;
    double r = 4.0;            // ball radius for the shrinking-domain functional
    double r0 = 1.0;           // inner radius for the divergence probe
    double t_min = 1.0;
    double t_max = std::exp(0.1);
    int t_count = 50;
    std::string radii = "1,2,3,4,5,6,7,8,9,10";  // comma-separated growth radii

    // output
    std::string out;           // empty = standard output
    std::string format;        // "", "csv", "json"; default depends on subcommand
    std::string config_path;   // optional flat key=value file; flags win
};

// Dispatch an already-parsed configuration.  Returns the process exit code:
// 0 every executed check passed, 1 module or check failure, 2 usage.
int run(const RunConfig& config);

// Parse argv (flags override an optional flat key=value --config file) and
// dispatch.  Errors are serialized as one-line JSON on standard error.
int run_cli(int argc, const char* const* argv);

}  // namespace expander::cli
