#pragma once

#include <cstdint>
#include <string>

namespace jacobiwvn::cli {

struct Options {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    std::int64_t n_override = 0;  // 0: take N from the config / command default
    bool quick = false;
};

// Runs one subcommand, writing its artifacts under out_dir.  Throws the library
// error types on failure; returns 0, or 1 when a verify suite fails.
int run_command(const Options& opt);

// run_command wrapped in the documented exit-code mapping (ValidationError 2,
// DomainError 3, NumericalError 4, DegeneracyError 5, anything else 1), with
// the message printed to stderr.
int dispatch(const Options& opt);

}  // namespace jacobiwvn::cli
