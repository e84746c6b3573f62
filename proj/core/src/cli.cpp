#include "dehaze/cli.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

#include "dehaze/config.hpp"
#include "dehaze/image_io.hpp"
#include "dehaze/keyvalue.hpp"
#include "dehaze/metrics.hpp"
#include "dehaze/pipeline.hpp"
#include "dehaze/synthesis.hpp"

namespace dehaze {

namespace fs = std::filesystem;

namespace {

template <typename Body>
int guarded(std::ostream& err, Body&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const BoundsError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

fs::path sibling(const fs::path& output, const std::string& suffix, const std::string& ext)
{
    return output.parent_path() / (output.stem().string() + suffix + ext);
}

ScalarMap normalised_for_dump(const ScalarMap& m)
{
    ScalarMap out = m;
    for (double& v : out.values()) {
        v = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

std::string anchors_text(const std::vector<Anchor>& anchors)
{
    std::ostringstream out;
    out << "# x y t\n";
    for (const Anchor& a : anchors) {
        out << a.x << ' ' << a.y << ' ' << format_real(a.t) << '\n';
    }
    return out.str();
}

}  // namespace

DehazeOutputs dehaze_output_paths(const fs::path& output)
{
    return {output, sibling(output, "_transmission", ".png"), sibling(output, "_airlight", ".txt"),
            sibling(output, "_manifest", ".txt")};
}

int run_dehaze(const DehazeOptions& opts, std::ostream& err)
{
    return guarded(err, [&] {
        PipelineConfig cfg;
        if (opts.config_file) {
            cfg = load_config(read_text_file(*opts.config_file));
        }
        for (const auto& [key, value] : opts.overrides) {
            set_config_field(cfg, key, value);
        }
        cfg.validate();
        const Image input = read_image(opts.input);
        const PipelineResult res = run_pipeline(input, cfg);

        const DehazeOutputs paths = dehaze_output_paths(opts.output);
        OutputBatch batch;
        batch.add(paths.image, encode_image_for(paths.image, res.output));
        batch.add(paths.transmission, encode_map16(res.transmission));
        batch.add_text(paths.airlight_report, serialize_airlight_report(res.report));
        std::string manifest = "input: " + opts.input.string() + "\n" + "output: " + paths.image.string() + "\n" +
                               "transmission: " + paths.transmission.string() + "\n" +
                               "airlight_report: " + paths.airlight_report.string() + "\n" + serialize_config(cfg);
        batch.add_text(paths.manifest, manifest);
        if (opts.dump_dir) {
            const fs::path& d = *opts.dump_dir;
            batch.add(d / "dark_channel.png", encode_map16(normalised_for_dump(res.dark)));
            batch.add(d / "transmission_raw.png", encode_map16(normalised_for_dump(res.t_raw)));
            batch.add(d / "transmission_nn.png", encode_map16(normalised_for_dump(res.transmission)));
            batch.add_text(d / "anchors.txt", anchors_text(res.anchors));
            batch.add(d / "airlight_sparse.png", encode_map16(normalised_for_dump(res.airlight.magnitudes)));
            if (res.airlight_field.size() > 0) {
                batch.add(d / "airlight_interpolated.png", encode_map16(normalised_for_dump(res.airlight_field)));
            }
            batch.add(d / "radiance.png", encode_png(res.radiance));
        }
        batch.commit();
        return static_cast<int>(exit_ok);
    });
}

int run_synthesize(const SynthesizeOptions& opts, std::ostream& err)
{
    return guarded(err, [&] {
        SceneDescription desc = parse_scene_description(read_text_file(opts.spec));
        SceneSpec scene = build_scene(desc);
        const fs::path base = opts.spec.parent_path();
        if (!desc.radiance_file.empty()) {
            fs::path p = desc.radiance_file;
            scene.radiance = read_image(p.is_absolute() ? p : base / p);
        }
        if (!desc.depth_file.empty()) {
            fs::path p = desc.depth_file;
            scene.depth = read_map16(p.is_absolute() ? p : base / p);
            for (double& v : scene.depth.values()) {
                v *= desc.depth_scale;
            }
        }
        if (!scene.depth.same_shape(scene.radiance)) {
            if (desc.depth_file.empty()) {
                // Generated depth follows the external radiance's size.
                desc.width = scene.radiance.width();
                desc.height = scene.radiance.height();
                scene.depth = generate_depth(desc);
            } else {
                throw ConfigError("scene", "'depth_file' does not match the radiance size");
            }
        }
        const Image hazy = synthesize_haze(scene);
        const ScalarMap t = transmission_from_depth(scene.depth, scene.beta);
        OutputBatch batch;
        batch.add(opts.out_dir / "hazy.png", encode_png(hazy));
        batch.add(opts.out_dir / "radiance.png", encode_png(scene.radiance));
        batch.add(opts.out_dir / "transmission.png", encode_map16(t));
        batch.add_text(opts.out_dir / "scene.txt", serialize_scene_description(desc));
        batch.commit();
        return static_cast<int>(exit_ok);
    });
}

namespace {

QualityReport evaluate_files(const fs::path& result, const fs::path& reference, const std::optional<fs::path>& t_est,
                             const std::optional<fs::path>& t_true, const EvaluationOptions& eo)
{
    const Image a = read_image(result);
    const Image b = read_image(reference);
    if (t_est.has_value() != t_true.has_value()) {
        throw ConfigError("evaluate", "--t-est and --t-true must be given together");
    }
    if (t_est) {
        const ScalarMap te = read_map16(*t_est);
        const ScalarMap tt = read_map16(*t_true);
        return evaluate_pair(a, b, &te, &tt, eo);
    }
    return evaluate_pair(a, b, nullptr, nullptr, eo);
}

std::optional<fs::path> find_with_suffix(const fs::path& dir, const std::string& name, const std::string& suffix)
{
    for (const char* ext : {".png", ".ppm"}) {
        const fs::path p = dir / (name + suffix + ext);
        if (fs::exists(p)) {
            return p;
        }
    }
    return std::nullopt;
}

void prefixed(std::ostringstream& out, const std::string& prefix, const QualityReport& r)
{
    std::istringstream lines(serialize_report(r));
    std::string line;
    while (std::getline(lines, line)) {
        out << prefix << '.' << line << '\n';
    }
}

}  // namespace

int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err)
{
    EvaluationOptions eo;
    eo.peak = opts.peak;
    eo.mask_sky = opts.mask_sky;
    const auto emit = [&](const std::string& text) {
        if (opts.report_file) {
            write_file_atomic(*opts.report_file, std::vector<unsigned char>(text.begin(), text.end()));
        } else {
            out << text;
        }
    };
    if (!opts.batch_dir) {
        return guarded(err, [&] {
            emit(serialize_report(evaluate_files(opts.result, opts.reference, opts.t_est, opts.t_true, eo)));
            return static_cast<int>(exit_ok);
        });
    }
    return guarded(err, [&] {
        const fs::path& dir = *opts.batch_dir;
        if (!fs::is_directory(dir)) {
            throw IoError("evaluate", "'" + dir.string() + "' is not a directory");
        }
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string stem = entry.path().stem().string();
            const std::string ext = entry.path().extension().string();
            const std::string tag = "_result";
            if ((ext == ".png" || ext == ".ppm") && stem.size() > tag.size() &&
                stem.compare(stem.size() - tag.size(), tag.size(), tag) == 0) {
                names.push_back(stem.substr(0, stem.size() - tag.size()));
            }
        }
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        std::ostringstream text;
        std::vector<QualityReport> ok;
        int failed = 0;
        int first_code = exit_ok;
        for (const std::string& name : names) {
            std::ostringstream pair_err;
            QualityReport report;
            const int code = guarded(pair_err, [&] {
                const auto result = find_with_suffix(dir, name, "_result");
                const auto reference = find_with_suffix(dir, name, "_reference");
                if (!reference) {
                    throw IoError("evaluate", "no reference image for '" + name + "'");
                }
                report = evaluate_files(*result, *reference, find_with_suffix(dir, name, "_t_est"),
                                        find_with_suffix(dir, name, "_t_true"), eo);
                return static_cast<int>(exit_ok);
            });
            if (code == exit_ok) {
                prefixed(text, name, report);
                ok.push_back(report);
            } else {
                std::string msg = pair_err.str();
                msg.erase(std::remove(msg.begin(), msg.end(), '\n'), msg.end());
                text << name << ".error: " << msg << '\n';
                err << name << ": " << msg << '\n';
                ++failed;
                if (first_code == exit_ok) {
                    first_code = code;
                }
            }
        }
        if (!ok.empty()) {
            prefixed(text, "aggregate", mean_report(ok));
        }
        text << "aggregate.count: " << ok.size() << '\n' << "aggregate.failed: " << failed << '\n';
        emit(text.str());
        if (names.empty()) {
            throw IoError("evaluate", "no *_result images in '" + dir.string() + "'");
        }
        return ok.empty() ? first_code : static_cast<int>(exit_ok);
    });
}

}  // namespace dehaze
