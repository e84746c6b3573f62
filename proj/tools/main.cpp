#include <algorithm>
#include <iostream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "dehaze/cli.hpp"

int main(int argc, char** argv)
{
    // `dehaze <in> -o <out>` is the default command; synthesize and evaluate
    // are named subcommands.
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty()) {
        const std::string_view first = args.front();
        if (first != "dehaze" && first != "synthesize" && first != "evaluate" && first != "-h" && first != "--help") {
            args.insert(args.begin(), "dehaze");
        }
    }
    std::reverse(args.begin(), args.end());

    CLI::App app{"Single image dehazing", "dehaze"};
    app.require_subcommand(1);

    dehaze::DehazeOptions dh;
    std::string config_file;
    std::string dump_dir;
    int patch = 0;
    double t0 = 0.0;
    double gamma = 0.0;
    std::string mode;
    int threads = 0;
    auto* dehaze_cmd = app.add_subcommand("dehaze", "Remove haze from an image");
    dehaze_cmd->add_option("input", dh.input, "Hazy input image (PNG or PPM)")->required();
    dehaze_cmd->add_option("-o,--output", dh.output, "Dehazed output image")->required();
    dehaze_cmd->add_option("--config", config_file, "key = value configuration file");
    dehaze_cmd->add_option("--patch", patch, "Dark channel patch size");
    dehaze_cmd->add_option("--t0", t0, "Lower transmission clamp");
    dehaze_cmd->add_option("--gamma", gamma, "Gamma correction exponent");
    dehaze_cmd->add_option("--mode", mode, "Recovery mode")->check(CLI::IsMember({"trans", "airlight"}));
    dehaze_cmd->add_option("--threads", threads, "Worker threads");
    dehaze_cmd->add_option("--dump-stages", dump_dir, "Directory for intermediate maps");

    dehaze::SynthesizeOptions syn;
    auto* synth_cmd = app.add_subcommand("synthesize", "Generate a hazy scene with ground truth");
    synth_cmd->add_option("spec", syn.spec, "Scene description file")->required();
    synth_cmd->add_option("-o,--output", syn.out_dir, "Output directory")->required();

    dehaze::EvaluateOptions ev;
    std::string t_est;
    std::string t_true;
    std::string batch;
    std::string report;
    auto* eval_cmd = app.add_subcommand("evaluate", "Compare a result against a reference");
    eval_cmd->add_option("result", ev.result, "Dehazed image");
    eval_cmd->add_option("reference", ev.reference, "Ground-truth image");
    auto* te = eval_cmd->add_option("--t-est", t_est, "Estimated transmission (16-bit PNG)");
    auto* tt = eval_cmd->add_option("--t-true", t_true, "True transmission (16-bit PNG)");
    te->needs(tt);
    tt->needs(te);
    eval_cmd->add_flag("--mask-sky", ev.mask_sky, "Exclude pixels with true transmission below 0.05");
    eval_cmd->add_option("--batch", batch, "Directory of NAME_result / NAME_reference pairs");
    eval_cmd->add_option("-o,--output", report, "Report file (default: standard output)");
    eval_cmd->add_option("--peak", ev.peak, "PSNR peak on the [0,1] scale (255 for 8-bit style values)");

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return dehaze::exit_config;
    }

    if (dehaze_cmd->parsed()) {
        if (!config_file.empty()) {
            dh.config_file = config_file;
        }
        if (!dump_dir.empty()) {
            dh.dump_dir = dump_dir;
        }
        if (dehaze_cmd->count("--patch")) {
            dh.overrides.emplace_back("patch_size", std::to_string(patch));
        }
        if (dehaze_cmd->count("--t0")) {
            dh.overrides.emplace_back("t0", dehaze_cmd->get_option("--t0")->as<std::string>());
        }
        if (dehaze_cmd->count("--gamma")) {
            dh.overrides.emplace_back("gamma", dehaze_cmd->get_option("--gamma")->as<std::string>());
        }
        if (!mode.empty()) {
            dh.overrides.emplace_back("mode", mode);
        }
        if (dehaze_cmd->count("--threads")) {
            dh.overrides.emplace_back("threads", std::to_string(threads));
        }
        return dehaze::run_dehaze(dh, std::cerr);
    }
    if (synth_cmd->parsed()) {
        return dehaze::run_synthesize(syn, std::cerr);
    }
    if (!t_est.empty()) {
        ev.t_est = t_est;
        ev.t_true = t_true;
    }
    if (!batch.empty()) {
        ev.batch_dir = batch;
    } else if (ev.result.empty() || ev.reference.empty()) {
        std::cerr << "evaluate: result and reference are required without --batch\n";
        return dehaze::exit_config;
    }
    if (!report.empty()) {
        ev.report_file = report;
    }
    return dehaze::run_evaluate(ev, std::cout, std::cerr);
}
