#ifndef IADT_CLI_HPP
#define IADT_CLI_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "iadt/iadt.hpp"

namespace iadt::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::array<std::string_view, 6> kBaselineMethods = {"logistic", "tca", "gfk",
                                                                     "sa",       "coral", "tl"};

// ---------------------------------------------------------------------------
// Shared helpers

/// Six decimals, or null when the metric is undefined.
inline Json rounded(std::optional<double> v) {
  if (!v) return nullptr;
  return std::round(*v * 1e6) / 1e6;
}

inline Json metrics_json(const MetricsReport& r) {
  return Json{{"acc", rounded(r.acc)},
              {"bac", rounded(r.bac)},
              {"auc", rounded(r.auc)},
              {"sen", rounded(r.sen)},
              {"spe", rounded(r.spe)}};
}

inline Json confusion_json(const Confusion& c) {
  return Json{{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

inline std::string cell(std::optional<double> v) {
  if (!v) return "NA";
  std::ostringstream o;
  o << std::fixed << std::setprecision(6) << *v;
  return o.str();
}

inline void print_metrics(std::ostream& out, const MetricsReport& r) {
  out << std::left << std::setw(8) << "metric" << "value\n";
  const std::pair<const char*, std::optional<double>> rows[] = {
      {"ACC", r.acc}, {"BAC", r.bac}, {"AUC", r.auc}, {"SEN", r.sen}, {"SPE", r.spe}};
  for (const auto& [name, v] : rows) {
    out << std::left << std::setw(8) << name;
    if (v) {
      out << std::fixed << std::setprecision(2) << *v * 100.0 << "%\n";
    } else {
      out << "undefined\n";
    }
  }
  out.unsetf(std::ios::floatfield);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline Dataset select_domain(const Dataset& ds, const std::string& which) {
  if (which == "all") return ds;
  return ds.domain(which == "source" ? Domain::source : Domain::target);
}

inline std::vector<double> parse_value_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (auto piece : detail::split_commas(text)) {
    const auto v = detail::parse_double(detail::trim(piece));
    if (!v) throw ParameterError(what + ": cannot parse '" + std::string(piece) + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw ParameterError(what + ": empty value list");
  return out;
}

inline void write_history(const std::string& path, const TrainHistory& h) {
  std::ostringstream o;
  o << "epoch,mmd,cls,recon,total\n";
  for (std::size_t e = 0; e < h.size(); ++e) {
    o << e + 1 << ',' << detail::format_double(h[e].mmd) << ',' << detail::format_double(h[e].cls)
      << ',' << detail::format_double(h[e].recon) << ',' << detail::format_double(h[e].total)
      << '\n';
  }
  write_text(path, o.str());
}

/// Training flags shared by train, sweep and the tl baseline. Values start at
/// the built-in defaults so `--help` prints them; only flags actually given on
/// the command line override the config file.
struct TrainFlags {
  TrainConfig defaults;
  std::string config_path;
  std::size_t latent_dim = defaults.latent_dim;
  std::size_t hidden_dim = defaults.hidden_dim;
  double lambda1 = defaults.lambda1;
  double lambda2 = defaults.lambda2;
  double lr = defaults.lr;
  std::size_t epochs = defaults.epochs;
  std::size_t batch_size = defaults.batch_size;
  std::string kernel = "linear";
  double gamma = defaults.kernel.gamma;
  std::uint64_t seed = defaults.seed;
  bool standardize = defaults.standardize;
  std::vector<std::pair<CLI::Option*, std::function<void(TrainConfig&)>>> opts;

  /// `with_kernel` = false leaves --kernel/--gamma free for the caller.
  void attach(CLI::App* app, bool with_kernel = true) {
    app->add_option("--config", config_path, "key=value config file (flags override it)")
        ->check(CLI::ExistingFile);
    auto add = [&](CLI::Option* o, std::function<void(TrainConfig&)> f) {
      o->capture_default_str();
      opts.emplace_back(o, std::move(f));
    };
    add(app->add_option("--latent-dim", latent_dim, "latent dimension"),
        [this](TrainConfig& c) { c.latent_dim = latent_dim; });
    add(app->add_option("--hidden-dim", hidden_dim, "hidden layer width"),
        [this](TrainConfig& c) { c.hidden_dim = hidden_dim; });
    add(app->add_option("--lambda1", lambda1, "MMD loss weight"),
        [this](TrainConfig& c) { c.lambda1 = lambda1; });
    add(app->add_option("--lambda2", lambda2, "classification loss weight"),
        [this](TrainConfig& c) { c.lambda2 = lambda2; });
    add(app->add_option("--lr", lr, "Adam learning rate"), [this](TrainConfig& c) { c.lr = lr; });
    add(app->add_option("--epochs", epochs, "training epochs"),
        [this](TrainConfig& c) { c.epochs = epochs; });
    add(app->add_option("--batch-size", batch_size, "rows per domain per batch"),
        [this](TrainConfig& c) { c.batch_size = batch_size; });
    if (with_kernel) {
      add(app->add_option("--kernel", kernel, "MMD kernel")->check(CLI::IsMember({"linear", "rbf"})),
          [this](TrainConfig& c) {
            c.kernel.kind = kernel == "rbf" ? KernelKind::rbf : KernelKind::linear;
          });
      add(app->add_option("--gamma", gamma, "rbf kernel width"),
          [this](TrainConfig& c) { c.kernel.gamma = gamma; });
    }
    add(app->add_option("--seed", seed, "random seed"), [this](TrainConfig& c) { c.seed = seed; });
    add(app->add_option("--standardize", standardize, "z-score features with source statistics"),
        [this](TrainConfig& c) { c.standardize = standardize; });
  }

  TrainConfig resolve() const {
    TrainConfig c = config_path.empty() ? TrainConfig{} : load_config(config_path);
    for (const auto& [o, apply] : opts)
      if (o->count() > 0) apply(c);
    validate(c);
    return c;
  }
};

struct LoadedDomains {
  Dataset source;
  Dataset target;
};

inline LoadedDomains load_domains(const std::string& path) {
  const Dataset ds = load_csv(path);
  LoadedDomains out{ds.domain(Domain::source), ds.domain(Domain::target)};
  if (out.source.empty()) throw DataError("'" + path + "' has no source-domain rows");
  if (out.target.empty()) throw DataError("'" + path + "' has no target-domain rows");
  return out;
}

inline MetricsReport evaluate_model(const TrainedModel& m, const Dataset& ds, Confusion* c = nullptr) {
  if (!ds.all_labeled()) throw DataError("evaluation needs a label on every selected sample");
  const Prediction p = predict(m, ds);
  const std::vector<int> y = ds.labels();
  const Confusion conf = confusion(y, p.labels);
  if (c) *c = conf;
  return metrics(conf, p.probs, y);
}

// ---------------------------------------------------------------------------
// Baselines

struct BaselineFlags {
  std::string method;
  std::optional<std::size_t> dim;
  double mu = 0.01;
  std::string kernel = "linear";
  double gamma = 0.1;
  double reg = 1.0;
  double finetune_fraction = 0.1;
};

struct BaselineOutcome {
  Json params;
  Confusion conf;
  MetricsReport report;
  std::size_t evaluated = 0;
  std::vector<std::string> notes;
};

inline std::size_t clip_dim(std::size_t wanted, std::size_t limit, const char* method,
                            std::vector<std::string>& notes) {
  if (limit == 0) throw DataError(std::string(method) + ": data too small for any component");
  if (wanted > limit) {
    notes.push_back(std::string(method) + ": dim " + std::to_string(wanted) + " clipped to " +
                    std::to_string(limit));
    return limit;
  }
  return wanted;
}

inline BaselineOutcome run_baseline(const LoadedDomains& data, const BaselineFlags& f,
                                    const TrainConfig& cfg) {
  if (!data.source.all_labeled()) throw DataError("baseline: every source sample must be labeled");
  if (!data.target.all_labeled()) {
    throw DataError("baseline: target samples need labels for evaluation");
  }
  BaselineOutcome out;
  out.params = Json::object();
  const Matrix xs = data.source.features();
  const Matrix xt = data.target.features();
  const std::vector<int> ys = data.source.labels();
  const std::size_t d = xs.cols(), ns = xs.rows(), nt = xt.rows();
  const std::size_t pca_limit = std::min({d, ns > 0 ? ns - 1 : 0, nt > 0 ? nt - 1 : 0});

  if (f.method == "tl") {
    const auto [tune, test] = split_stratified(data.target, f.finetune_fraction, cfg.seed);
    if (test.empty()) throw DataError("tl: no target samples left for evaluation");
    TrainedModel m{init_params(d, cfg.hidden_dim, cfg.latent_dim, cfg.seed),
                   cfg.standardize ? fit_standardizer(data.source) : FeatureStats::identity(d)};
    m = finetune(m, data.source, cfg);
    m = finetune(m, tune, cfg);
    out.report = evaluate_model(m, test, &out.conf);
    out.evaluated = test.size();
    out.params = Json{{"finetune_fraction", f.finetune_fraction},
                      {"finetune_samples", tune.size()},
                      {"epochs", cfg.epochs},
                      {"lr", cfg.lr},
                      {"seed", cfg.seed}};
  } else {
    SubspaceMap map;
    if (f.method == "logistic") {
      map = identity_map(d);
    } else if (f.method == "tca") {
      const std::size_t dim = clip_dim(f.dim.value_or(40), ns + nt, "tca", out.notes);
      const KernelSpec k = f.kernel == "rbf" ? KernelSpec::rbf(f.gamma) : KernelSpec::linear();
      map = tca_fit(xs, xt, dim, f.mu, k);
      out.params = Json{{"dim", dim}, {"components", map.projection.cols()}, {"mu", f.mu}, {"kernel", f.kernel}};
      if (f.kernel == "rbf") out.params["gamma"] = f.gamma;
    } else if (f.method == "gfk") {
      const std::size_t dim = clip_dim(f.dim.value_or(20), std::min(d / 2, pca_limit), "gfk", out.notes);
      map = gfk_fit(xs, xt, dim);
      out.params = Json{{"dim", dim}};
    } else if (f.method == "sa") {
      const std::size_t dim = clip_dim(f.dim.value_or(20), pca_limit, "sa", out.notes);
      map = sa_fit(xs, xt, dim);
      out.params = Json{{"dim", dim}};
    } else {
      map = coral_fit(xs, xt, f.reg);
      out.params = Json{{"reg", f.reg}};
    }
    const Prediction p = baseline_predict(map, xs, ys, xt);
    const std::vector<int> yt = data.target.labels();
    out.conf = confusion(yt, p.labels);
    out.report = metrics(out.conf, p.probs, yt);
    out.evaluated = nt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entry point

/// Runs one command line. `args` excludes the program name. Exit codes: 0
/// success, 1 data/model/file error, 2 usage or configuration error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attention autoencoder with domain transfer for ROI feature data", "iadt"};
  app.require_subcommand(1);

  // synth
  SynthSpec synth;
  double synth_shift = 0.0;
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic two-domain dataset");
  c_synth->add_option("--out", synth_out, "output CSV")->required();
  c_synth->add_option("--n-source", synth.n_source, "source samples")->capture_default_str();
  c_synth->add_option("--n-target", synth.n_target, "target samples")->capture_default_str();
  c_synth->add_option("--dim", synth.dim, "feature count")->capture_default_str();
  c_synth->add_option("--class-sep", synth.class_sep, "distance between class means")
      ->capture_default_str();
  c_synth->add_option("--noise-sd", synth.noise_sd, "per-feature noise sd")->capture_default_str();
  c_synth->add_option("--shift", synth_shift, "target translation along the first feature")
      ->capture_default_str();
  c_synth->add_option("--rotation", synth.rotation, "target rotation (radians) in the first plane")
      ->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "random seed")->capture_default_str();

  // train
  std::string data_path, model_path, history_path, out_path;
  TrainFlags train_flags;
  auto* c_train = app.add_subcommand("train", "Train a model on source (labeled) and target rows");
  c_train->add_option("--data", data_path, "input CSV with both domains")->required();
  c_train->add_option("--model", model_path, "output model file")->required();
  c_train->add_option("--history", history_path,
                      "per-epoch loss CSV (default: history.csv next to the model)");
  train_flags.attach(c_train);

  // predict
  std::string domain_sel = "all";
  double threshold = 0.5;
  auto* c_predict = app.add_subcommand("predict", "Write per-sample probabilities and labels");
  c_predict->add_option("--data", data_path, "input CSV")->required();
  c_predict->add_option("--model", model_path, "model file")->required();
  c_predict->add_option("--out", out_path, "output CSV")->required();
  c_predict->add_option("--domain", domain_sel, "rows to score")
      ->check(CLI::IsMember({"source", "target", "all"}))
      ->capture_default_str();
  c_predict->add_option("--threshold", threshold, "decision threshold")->capture_default_str();

  // evaluate
  std::string eval_domain = "target";
  auto* c_eval = app.add_subcommand("evaluate", "Score a model on labeled rows");
  c_eval->add_option("--data", data_path, "labeled input CSV")->required();
  c_eval->add_option("--model", model_path, "model file")->required();
  c_eval->add_option("--out", out_path, "output JSON");
  c_eval->add_option("--domain", eval_domain, "rows to evaluate")
      ->check(CLI::IsMember({"source", "target", "all"}))
      ->capture_default_str();

  // baseline
  BaselineFlags bf;
  TrainFlags tl_flags;
  std::size_t dim_flag = 0;
  auto* c_base = app.add_subcommand("baseline", "Run a comparison method on the target domain");
  c_base->add_option("--data", data_path, "input CSV with both domains (target labeled)")->required();
  c_base->add_option("--method", bf.method, "logistic|tca|gfk|sa|coral|tl")->required();
  auto* dim_opt = c_base->add_option("--dim", dim_flag,
                                     "subspace dimension (default tca 40, gfk 20, sa 20; clipped to "
                                     "what the data allows)");
  c_base->add_option("--mu", bf.mu, "tca regularizer")->capture_default_str();
  c_base->add_option("--kernel", bf.kernel, "tca kernel")
      ->check(CLI::IsMember({"linear", "rbf"}))
      ->capture_default_str();
  c_base->add_option("--gamma", bf.gamma, "tca rbf width")->capture_default_str();
  c_base->add_option("--reg", bf.reg, "coral covariance regularizer")->capture_default_str();
  c_base->add_option("--finetune-fraction", bf.finetune_fraction,
                     "tl: fraction of target rows used for fine-tuning")
      ->capture_default_str();
  c_base->add_option("--out", out_path, "output JSON");
  tl_flags.attach(c_base, false);

  // rank-rois
  std::size_t top = 10;
  std::string filter = "correct";
  std::string rank_domain = "target";
  auto* c_rank = app.add_subcommand("rank-rois", "Rank input features by mean attention weight");
  c_rank->add_option("--data", data_path, "input CSV")->required();
  c_rank->add_option("--model", model_path, "model file")->required();
  c_rank->add_option("--top", top, "rows to print (clipped to the feature count)")
      ->capture_default_str();
  c_rank->add_option("--filter", filter,
                     "correct: correctly identified positives only; all: every selected row")
      ->check(CLI::IsMember({"correct", "all"}))
      ->capture_default_str();
  c_rank->add_option("--domain", rank_domain, "rows to use")
      ->check(CLI::IsMember({"source", "target", "all"}))
      ->capture_default_str();
  c_rank->add_option("--out", out_path, "output JSON with the full ranking");

  // sweep
  std::string sweep_param, sweep_values, sweep_values2;
  TrainFlags sweep_flags;
  auto* c_sweep = app.add_subcommand("sweep", "Train and evaluate over a list of settings");
  c_sweep->add_option("--data", data_path, "input CSV with both domains (target labeled)")
      ->required();
  c_sweep->add_option("--param", sweep_param, "latent_dim | lambda1 | lambda2 | lambda1,lambda2")
      ->required()
      ->check(CLI::IsMember({"latent_dim", "lambda1", "lambda2", "lambda1,lambda2"}));
  c_sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  c_sweep->add_option("--values2", sweep_values2,
                      "lambda2 values for the grid (default: same as --values)");
  c_sweep->add_option("--out", out_path, "output CSV");
  sweep_flags.attach(c_sweep);

  // export-latent
  auto* c_latent = app.add_subcommand("export-latent", "Write latent codes of every row");
  c_latent->add_option("--data", data_path, "input CSV")->required();
  c_latent->add_option("--model", model_path, "model file")->required();
  c_latent->add_option("--out", out_path, "output CSV")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_synth->parsed()) {
      if (synth_shift != 0.0) {
        synth.shift.assign(synth.dim, 0.0);
        synth.shift[0] = synth_shift;
      }
      const auto [s, t] = synth_domains(synth);
      save_csv(synth_out, concat(s, t));
      out << "wrote " << s.size() + t.size() << " rows (" << s.size() << " source, " << t.size()
          << " target) to " << synth_out << '\n';
    } else if (c_train->parsed()) {
      const TrainConfig cfg = train_flags.resolve();
      const LoadedDomains data = load_domains(data_path);
      const TrainResult r = train(data.source, data.target, cfg);
      save_model(model_path, r.model);
      if (history_path.empty()) {
        history_path = (std::filesystem::path(model_path).parent_path() / "history.csv").string();
      }
      write_history(history_path, r.history);
      out << "trained " << cfg.epochs << " epochs on " << data.source.size() << " source / "
          << data.target.size() << " target rows\n";
      if (!r.history.empty()) {
        out << "final loss " << detail::format_double(r.history.back().total) << '\n';
      }
      out << "model: " << model_path << "\nhistory: " << history_path << '\n';
    } else if (c_predict->parsed()) {
      const TrainedModel m = load_model(model_path);
      const Dataset ds = select_domain(load_csv(data_path), domain_sel);
      const Prediction p = predict(m, ds, threshold);
      std::ostringstream o;
      o << "subject_id,domain,prob,pred\n";
      for (std::size_t i = 0; i < ds.size(); ++i) {
        o << ds.samples[i].subject_id << ',' << to_string(ds.samples[i].domain) << ','
          << detail::format_double(p.probs[i]) << ',' << p.labels[i] << '\n';
      }
      write_text(out_path, o.str());
      out << "wrote " << ds.size() << " predictions to " << out_path << '\n';
    } else if (c_eval->parsed()) {
      const TrainedModel m = load_model(model_path);
      const Dataset ds = select_domain(load_csv(data_path), eval_domain);
      if (ds.empty()) throw DataError("evaluate: no rows in domain '" + eval_domain + "'");
      Confusion conf;
      const MetricsReport r = evaluate_model(m, ds, &conf);
      print_metrics(out, r);
      if (!out_path.empty()) {
        Json j = metrics_json(r);
        j["n"] = ds.size();
        j["confusion"] = confusion_json(conf);
        write_text(out_path, j.dump(2) + "\n");
      }
    } else if (c_base->parsed()) {
      if (bf.method == "voxcnn") {
        err << "baseline: voxcnn is out of scope (it needs voxel images, not ROI features)\n";
        return 2;
      }
      if (std::find(kBaselineMethods.begin(), kBaselineMethods.end(), bf.method) ==
          kBaselineMethods.end()) {
        err << "baseline: unknown method '" << bf.method
            << "'; valid: logistic, tca, gfk, sa, coral, tl\n";
        return 2;
      }
      if (dim_opt->count() > 0) bf.dim = dim_flag;
      const TrainConfig cfg = tl_flags.resolve();
      const LoadedDomains data = load_domains(data_path);
      const BaselineOutcome r = run_baseline(data, bf, cfg);
      for (const auto& n : r.notes) err << n << '\n';
      out << "method " << bf.method << ", " << r.evaluated << " target rows evaluated\n";
      print_metrics(out, r.report);
      if (!out_path.empty()) {
        Json j{{"method", bf.method}, {"params", r.params}};
        const Json mj = metrics_json(r.report);
        for (const auto& [k, v] : mj.items()) j[k] = v;
        j["n"] = r.evaluated;
        j["confusion"] = confusion_json(r.conf);
        write_text(out_path, j.dump(2) + "\n");
      }
    } else if (c_rank->parsed()) {
      const TrainedModel m = load_model(model_path);
      const Dataset ds = select_domain(load_csv(data_path), rank_domain);
      if (ds.empty()) throw DataError("rank-rois: no rows in domain '" + rank_domain + "'");
      RoiRanking r;
      if (filter == "all") {
        r = rank_rois(m.params, m.stats, ds, RoiFilter::all);
      } else {
        if (!ds.all_labeled()) {
          throw DataError("rank-rois: --filter correct needs labels; use --filter all");
        }
        const std::vector<int> y = ds.labels();
        try {
          r = rank_rois(m.params, m.stats, ds, RoiFilter::correct_positives, y);
        } catch (const DataError&) {
          throw DataError("rank-rois: no correctly identified positive samples; pass --filter all "
                          "to average over every row");
        }
      }
      const std::size_t k = std::min(top, r.entries.size());
      out << "rank  index  weight     name\n";
      for (std::size_t i = 0; i < k; ++i) {
        const RoiWeight& e = r.entries[i];
        out << std::left << std::setw(6) << i + 1 << std::setw(7) << e.roi_index << std::fixed
            << std::setprecision(6) << std::setw(11) << e.weight << e.roi_name << '\n';
      }
      out.unsetf(std::ios::floatfield);
      out << r.samples_used << " samples used\n";
      if (!out_path.empty()) {
        Json rows = Json::array();
        for (std::size_t i = 0; i < r.entries.size(); ++i) {
          const RoiWeight& e = r.entries[i];
          rows.push_back(Json{{"rank", i + 1},
                              {"index", e.roi_index},
                              {"name", e.roi_name},
                              {"weight", e.weight},
                              {"shifted", e.shifted}});
        }
        const Json j{{"filter", filter}, {"samples_used", r.samples_used}, {"rois", rows}};
        write_text(out_path, j.dump(2) + "\n");
      }
    } else if (c_sweep->parsed()) {
      const TrainConfig base = sweep_flags.resolve();
      const bool grid = sweep_param == "lambda1,lambda2";
      const std::vector<double> v1 = parse_value_list(sweep_values, "--values");
      const std::vector<double> v2 =
          grid ? parse_value_list(sweep_values2.empty() ? sweep_values : sweep_values2, "--values2")
               : std::vector<double>{};
      std::vector<TrainConfig> points;
      std::vector<std::vector<double>> keys;
      auto add_point = [&](TrainConfig c, std::vector<double> key) {
        c.seed = base.seed + points.size();
        validate(c);
        points.push_back(c);
        keys.push_back(std::move(key));
      };
      for (double a : v1) {
        if (grid) {
          for (double b : v2) {
            TrainConfig c = base;
            c.lambda1 = a;
            c.lambda2 = b;
            add_point(c, {a, b});
          }
          continue;
        }
        TrainConfig c = base;
        if (sweep_param == "latent_dim") {
          if (!(a >= 1.0) || a != std::floor(a)) {
            throw ParameterError("sweep: latent_dim values must be positive integers");
          }
          c.latent_dim = static_cast<std::size_t>(a);
        } else if (sweep_param == "lambda1") {
          c.lambda1 = a;
        } else {
          c.lambda2 = a;
        }
        add_point(c, {a});
      }
      const LoadedDomains data = load_domains(data_path);
      if (!data.target.all_labeled()) throw DataError("sweep: target samples need labels");
      std::ostringstream csv;
      csv << (grid ? "lambda1,lambda2" : sweep_param) << ",acc,bac,auc,sen,spe\n";
      for (std::size_t i = 0; i < points.size(); ++i) {
        const TrainResult tr = train(data.source, data.target, points[i]);
        const MetricsReport r = evaluate_model(tr.model, data.target);
        for (double k : keys[i]) csv << std::setprecision(15) << k << ',';
        csv << cell(r.acc) << ',' << cell(r.bac) << ',' << cell(r.auc) << ',' << cell(r.sen) << ','
            << cell(r.spe) << '\n';
      }
      if (out_path.empty()) {
        out << csv.str();
      } else {
        write_text(out_path, csv.str());
        out << "wrote " << points.size() << " rows to " << out_path << '\n';
      }
    } else if (c_latent->parsed()) {
      const TrainedModel m = load_model(model_path);
      const Dataset ds = load_csv(data_path);
      export_latent(m.params, m.stats, ds, out_path);
      out << "wrote " << ds.size() << " latent codes to " << out_path << '\n';
    }
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace iadt::cli

namespace iadt {

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli::run(args, std::cout, std::cerr);
}

}  // namespace iadt

#endif  // IADT_CLI_HPP
