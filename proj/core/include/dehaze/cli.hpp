#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dehaze {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_io = 3,
    exit_numeric = 4,
};

struct DehazeOptions {
    std::filesystem::path input;
    std::filesystem::path output;
    std::optional<std::filesystem::path> config_file;
    /// Command-line settings applied after the config file, as (key, value).
    std::vector<std::pair<std::string, std::string>> overrides;
    std::optional<std::filesystem::path> dump_dir;
};

/// Paths written next to the dehazed image.
struct DehazeOutputs {
    std::filesystem::path image;
    std::filesystem::path transmission;
    std::filesystem::path airlight_report;
    std::filesystem::path manifest;
};
DehazeOutputs dehaze_output_paths(const std::filesystem::path& output);

/// Loads, runs the pipeline and writes every output at once (temporaries then
/// rename). Messages go to `err`. Returns an ExitCode.
int run_dehaze(const DehazeOptions& opts, std::ostream& err);

struct SynthesizeOptions {
    std::filesystem::path spec;
    std::filesystem::path out_dir;
};

/// Writes hazy.png, radiance.png, transmission.png (16-bit) and scene.txt.
int run_synthesize(const SynthesizeOptions& opts, std::ostream& err);

struct EvaluateOptions {
    std::filesystem::path result;
    std::filesystem::path reference;
    std::optional<std::filesystem::path> t_est;
    std::optional<std::filesystem::path> t_true;
    bool mask_sky = false;
    /// Every NAME_result.{png,ppm} with a NAME_reference.{png,ppm} sibling
    /// (and optionally NAME_t_est.png, NAME_t_true.png) forms a pair.
    std::optional<std::filesystem::path> batch_dir;
    std::optional<std::filesystem::path> report_file;
    double peak = 1.0;
};

/// Writes the report to report_file, or to `out` when none is given.
int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace dehaze
