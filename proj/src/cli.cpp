// SPDX-License-Identifier: Apache-2.0
#include "gs2d/cli.hpp"

#include "gs2d/dither.hpp"
#include "gs2d/gaussian.hpp"
#include "gs2d/image.hpp"
#include "gs2d/metrics.hpp"
#include "gs2d/ppm.hpp"
#include "gs2d/rasterizer.hpp"
#include "gs2d/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace gs2d {

namespace {

using nlohmann::json;

json json_number(real v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

struct FitArgs {
    std::string image;
    std::string init = "random";
    std::size_t num_gaussians = 0;
    int kernel = 3;
    std::string ppm = "gradient";
    int iters = 10000;
    real lr = 1e-3;
    std::uint64_t seed = 0;
    std::string loss = "l2";
    real lambda = 1.0;
    bool cosine_lr = false;
    real time_budget = 0.0;
    int log_every = 0;
    std::string out;
    std::string log_csv;
    int checkpoint_every = 0;
    std::string checkpoint;
    real cutoff = 3.0;
    bool no_init_gain = false;
};

FitConfig to_config(const FitArgs& a) {
    FitConfig cfg;
    cfg.iterations = a.iters;
    cfg.lr = a.lr;
    cfg.seed = a.seed;
    cfg.kernel = a.kernel;
    cfg.log_every = a.log_every;
    cfg.time_budget = a.time_budget;
    cfg.cosine_lr = a.cosine_lr;
    cfg.checkpoint_every = a.checkpoint_every;
    cfg.checkpoint_path = a.checkpoint;
    cfg.cutoff_sigma = a.cutoff;
    cfg.init_gain = !a.no_init_gain;
    cfg.num_gaussians = a.num_gaussians;

    if (a.loss == "l2") {
        cfg.loss = LossKind::L2;
    } else if (a.loss == "rec") {
        cfg.loss = LossKind::Rec;
        cfg.lambda = a.lambda;
    } else {
        throw CLI::ValidationError("--loss must be l2 or rec");
    }

    if (a.init == "random") {
        cfg.init = InitKind::Random;
        if (cfg.num_gaussians == 0)
            throw CLI::ValidationError("--init random requires --num-gaussians");
    } else if (a.init == "structured") {
        cfg.init = InitKind::Structured;
    } else if (a.init == "quadtree") {
        cfg.init = InitKind::Quadtree;
    } else {
        throw CLI::ValidationError("--init must be random, structured or quadtree");
    }

    if (cfg.init == InitKind::Structured) {
        if (a.ppm == "gradient") {
            cfg.ppm_source = PpmSource::Gradient;
        } else if (a.ppm.rfind("pseudo:", 0) == 0) {
            cfg.ppm_source = PpmSource::Pseudo;
            GaussianSet ref = load_g2di(a.ppm.substr(7));
            cfg.pseudo_positions = gaussian_pixel_positions(ref);
        } else {
            throw CLI::ValidationError("--ppm must be gradient or pseudo:<model>");
        }
    }
    return cfg;
}

int run_fit(const FitArgs& a) {
    ImageBuffer img = load_png(a.image);
    FitConfig cfg = to_config(a);

    FitResult res = fit(img, cfg);
    for (const auto& e : res.log)
        std::cerr << "iter " << e.iteration << "  t=" << e.elapsed_s << "s  psnr=" << e.psnr
                  << "  loss=" << e.loss << "\n";

    if (!a.out.empty())
        save_g2di(res.set, a.out);
    if (!a.log_csv.empty())
        write_metric_csv(res.log, a.log_csv);

    const LogEntry& last = res.log.back();
    json j;
    j["psnr"] = json_number(last.psnr);
    j["ms_ssim"] = last.ms_ssim;
    j["loss"] = last.loss;
    j["n_gaussians"] = last.n_gaussians;
    j["iterations"] = last.iteration;
    j["elapsed_s"] = last.elapsed_s;
    j["stopped_by_budget"] = res.stopped_by_budget;
    std::cout << j.dump() << "\n";
    return 0;
}

int run_render(const std::string& model_path, const std::string& out_path, real cutoff) {
    GaussianSet set = load_g2di(model_path);
    ImageBuffer img = render(set, {cutoff});
    save_png(img, out_path);
    return 0;
}

int run_ppm(const std::string& image_path, const std::string& mode, const std::string& model_path,
            const std::string& out_path, std::string preview_path, int profile_row) {
    ImageBuffer img = load_png(image_path);
    ProbabilityMap map;
    if (mode == "gradient") {
        map = gradient_ppm(img);
    } else if (mode == "pseudo") {
        if (model_path.empty())
            throw CLI::ValidationError("--mode pseudo requires --model");
        GaussianSet ref = load_g2di(model_path);
        map = pseudo_ppm(gaussian_pixel_positions(ref), img.width, img.height);
    } else {
        throw CLI::ValidationError("--mode must be gradient or pseudo");
    }

    if (!out_path.empty()) {
        save_ppmf(map, out_path);
        if (preview_path.empty())
            preview_path = out_path + ".png";
        save_gray_png(map.values, map.width, map.height, preview_path);
    }

    real mn = map.values[0], mx = map.values[0], mean = 0.0;
    for (real v : map.values) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        mean += v;
    }
    mean /= static_cast<real>(map.values.size());

    json j;
    j["width"] = map.width;
    j["height"] = map.height;
    j["min"] = mn;
    j["mean"] = mean;
    j["max"] = mx;
    if (profile_row >= 0) {
        if (profile_row >= map.height)
            throw CLI::ValidationError("--profile-row out of range");
        json row = json::array();
        for (int c = 0; c < map.width; ++c)
            row.push_back(map.at(profile_row, c));
        j["profile_row"] = profile_row;
        j["profile"] = row;
    }
    std::cout << j.dump() << "\n";
    return 0;
}

int run_eval(const std::string& image_path, const std::string& model_path, real cutoff) {
    ImageBuffer img = load_png(image_path);
    GaussianSet set = load_g2di(model_path);
    if (set.width != img.width || set.height != img.height)
        throw std::invalid_argument("eval: image and model dimensions differ");

    ImageBuffer rendered = render(set, {cutoff});
    // Clamp like the PNG export so eval matches a rendered file.
    for (auto& v : rendered.data)
        v = std::clamp(v, 0.0, 1.0);

    real m = mse_l2(rendered, img);
    json j;
    j["psnr"] = json_number(psnr(rendered, img));
    j["ms_ssim"] = ms_ssim(rendered, img);
    j["mse"] = m;
    j["n_gaussians"] = set.size();
    j["params_k"] = 8.0 * static_cast<real>(set.size()) / 1000.0;
    std::cout << j.dump() << "\n";
    return 0;
}

struct BenchArgs {
    std::string image;
    int kernel = 3;
    int iters = 5000;
    int log_every = 100;
    std::string at = "2,10,20";
    std::uint64_t seed = 0;
    std::string out;
    std::string curves;
    real cutoff = 3.0;
};

int run_bench(const BenchArgs& a) {
    ImageBuffer img = load_png(a.image);

    std::vector<real> checkpoints;
    {
        std::stringstream ss(a.at);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty())
                checkpoints.push_back(std::stod(tok));
    }
    if (checkpoints.empty())
        throw CLI::ValidationError("--at needs at least one checkpoint");

    FitConfig structured;
    structured.init = InitKind::Structured;
    structured.kernel = a.kernel;
    structured.iterations = a.iters;
    structured.log_every = a.log_every;
    structured.seed = a.seed;
    structured.cutoff_sigma = a.cutoff;
    std::cerr << "bench: structured run\n";
    FitResult rs = fit(img, structured);

    FitConfig rnd = structured;
    rnd.init = InitKind::Random;
    rnd.num_gaussians = rs.set.size(); // matched gaussian budget
    std::cerr << "bench: random run (n=" << rnd.num_gaussians << ")\n";
    FitResult rr = fit(img, rnd);

    auto at_time = [](const std::vector<LogEntry>& log, real t) {
        const LogEntry* best = &log.front();
        for (const auto& e : log)
            if (e.elapsed_s <= t)
                best = &e;
        return *best;
    };

    std::ostringstream csv;
    csv << "strategy,checkpoint_s,iteration,elapsed_s,psnr,ms_ssim,n_gaussians\n";
    for (const auto& [name, res] :
         {std::pair<const char*, const FitResult*>{"structured", &rs}, {"random", &rr}}) {
        for (real t : checkpoints) {
            LogEntry e = at_time(res->log, t);
            csv << name << "," << t << "," << e.iteration << "," << e.elapsed_s << "," << e.psnr
                << "," << e.ms_ssim << "," << e.n_gaussians << "\n";
        }
    }
    if (!a.out.empty()) {
        std::ofstream f(a.out);
        if (!f)
            throw io_error("cannot open '" + a.out + "' for writing");
        f << csv.str();
    }
    std::cout << csv.str();

    if (!a.curves.empty()) {
        std::ofstream f(a.curves);
        if (!f)
            throw io_error("cannot open '" + a.curves + "' for writing");
        f << "# gnuplot: plot 'curves.dat' i 0 u 1:3 w l t 'structured', '' i 1 u 1:3 w l t "
             "'random'\n";
        for (const auto& [name, res] :
             {std::pair<const char*, const FitResult*>{"structured", &rs}, {"random", &rr}}) {
            f << "# strategy=" << name << "\n# iteration elapsed_s psnr\n";
            for (const auto& e : res->log)
                f << e.iteration << " " << e.elapsed_s << " " << e.psnr << "\n";
            f << "\n\n";
        }
    }
    return 0;
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"2D gaussian splatting image representation"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CLI::App* cmd_fit = app.add_subcommand("fit", "Fit a gaussian set to an image");
    cmd_fit->add_option("image", fit_args.image, "input PNG")->required();
    cmd_fit->add_option("--init", fit_args.init, "random | structured | quadtree");
    cmd_fit->add_option("--num-gaussians", fit_args.num_gaussians, "count for random init");
    cmd_fit->add_option("--kernel", fit_args.kernel, "dither patch size (structured init)");
    cmd_fit->add_option("--ppm", fit_args.ppm, "gradient | pseudo:<model.g2d>");
    cmd_fit->add_option("--iters", fit_args.iters, "optimization steps");
    cmd_fit->add_option("--lr", fit_args.lr, "Adam learning rate");
    cmd_fit->add_option("--seed", fit_args.seed, "RNG seed");
    cmd_fit->add_option("--loss", fit_args.loss, "l2 | rec");
    cmd_fit->add_option("--lambda", fit_args.lambda, "rec-loss L2 weight");
    cmd_fit->add_flag("--cosine-lr", fit_args.cosine_lr, "cosine decay to 1e-5");
    cmd_fit->add_option("--time-budget", fit_args.time_budget, "wall-clock budget in seconds");
    cmd_fit->add_option("--log-every", fit_args.log_every, "metric log interval");
    cmd_fit->add_option("--out", fit_args.out, "output model (G2DI)");
    cmd_fit->add_option("--log", fit_args.log_csv, "metric CSV path");
    cmd_fit->add_option("--checkpoint-every", fit_args.checkpoint_every, "checkpoint interval");
    cmd_fit->add_option("--checkpoint", fit_args.checkpoint, "checkpoint path (@ITER@ expands)");
    cmd_fit->add_option("--cutoff", fit_args.cutoff, "footprint cutoff in sigmas");
    cmd_fit->add_flag("--no-init-gain", fit_args.no_init_gain,
                      "disable structured-init brightness gain");

    std::string render_model, render_out;
    real render_cutoff = 3.0;
    CLI::App* cmd_render = app.add_subcommand("render", "Render a stored model to PNG");
    cmd_render->add_option("model", render_model, "G2DI model")->required();
    cmd_render->add_option("--out", render_out, "output PNG")->required();
    cmd_render->add_option("--cutoff", render_cutoff, "footprint cutoff in sigmas");

    std::string ppm_image, ppm_mode = "gradient", ppm_model, ppm_out, ppm_preview;
    int ppm_profile_row = -1;
    CLI::App* cmd_ppm = app.add_subcommand("ppm", "Generate a probability map");
    cmd_ppm->add_option("image", ppm_image, "input PNG")->required();
    cmd_ppm->add_option("--mode", ppm_mode, "gradient | pseudo");
    cmd_ppm->add_option("--model", ppm_model, "reference model for pseudo mode");
    cmd_ppm->add_option("--out", ppm_out, "output PPMF path");
    cmd_ppm->add_option("--preview", ppm_preview, "grayscale preview PNG path");
    cmd_ppm->add_option("--profile-row", ppm_profile_row, "dump one row of probabilities");

    std::string eval_image, eval_model;
    real eval_cutoff = 3.0;
    CLI::App* cmd_eval = app.add_subcommand("eval", "Metrics of a model against an image");
    cmd_eval->add_option("image", eval_image, "input PNG")->required();
    cmd_eval->add_option("model", eval_model, "G2DI model")->required();
    cmd_eval->add_option("--cutoff", eval_cutoff, "footprint cutoff in sigmas");

    BenchArgs bench_args;
    CLI::App* cmd_bench = app.add_subcommand("bench", "Compare init strategies, matched counts");
    cmd_bench->add_option("image", bench_args.image, "input PNG")->required();
    cmd_bench->add_option("--kernel", bench_args.kernel, "dither patch size");
    cmd_bench->add_option("--iters", bench_args.iters, "steps per strategy");
    cmd_bench->add_option("--log-every", bench_args.log_every, "metric log interval");
    cmd_bench->add_option("--at", bench_args.at, "comma-separated checkpoint seconds");
    cmd_bench->add_option("--seed", bench_args.seed, "RNG seed");
    cmd_bench->add_option("--out", bench_args.out, "comparison CSV path");
    cmd_bench->add_option("--curves", bench_args.curves, "gnuplot curve file");
    cmd_bench->add_option("--cutoff", bench_args.cutoff, "footprint cutoff in sigmas");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(cmd_fit))
            return run_fit(fit_args);
        if (app.got_subcommand(cmd_render))
            return run_render(render_model, render_out, render_cutoff);
        if (app.got_subcommand(cmd_ppm))
            return run_ppm(ppm_image, ppm_mode, ppm_model, ppm_out, ppm_preview, ppm_profile_row);
        if (app.got_subcommand(cmd_eval))
            return run_eval(eval_image, eval_model, eval_cutoff);
        if (app.got_subcommand(cmd_bench))
            return run_bench(bench_args);
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace gs2d
