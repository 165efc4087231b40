#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chaosforge/artifact.hpp"
#include "chaosforge/balance.hpp"
#include "chaosforge/chaos.hpp"
#include "chaosforge/clustering.hpp"
#include "chaosforge/csv.hpp"
#include "chaosforge/errors.hpp"
#include "chaosforge/evaluation.hpp"
#include "chaosforge/rng.hpp"
#include "chaosforge/systems.hpp"
#include "chaosforge/transition.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chaosforge;

namespace {

struct RunConfig {
    uint64_t seed = 0;
    size_t patch_length = 16;
    double softdtw_gamma = 1.0;
    double balance_alpha_entropy = 0.6;
    double balance_alpha_cv = 0.5;
    double curation_fraction = 0.5;
    size_t kmeans_kmax = 16;
    double action_scale = 1.0;
    std::vector<std::string> inputs;
    std::string output;
};

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("config parse error in " + path + ": " + e.what());
    }
    for (auto& [key, val] : j.items()) {
        if (key == "seed")
            cfg.seed = val.get<uint64_t>();
        else if (key == "patch_length")
            cfg.patch_length = val.get<size_t>();
        else if (key == "softdtw_gamma")
            cfg.softdtw_gamma = val.get<double>();
        else if (key == "balance_alpha_entropy")
            cfg.balance_alpha_entropy = val.get<double>();
        else if (key == "balance_alpha_cv")
            cfg.balance_alpha_cv = val.get<double>();
        else if (key == "curation_fraction")
            cfg.curation_fraction = val.get<double>();
        else if (key == "kmeans_kmax")
            cfg.kmeans_kmax = val.get<size_t>();
        else if (key == "action_scale")
            cfg.action_scale = val.get<double>();
        else if (key == "inputs")
            cfg.inputs = val.get<std::vector<std::string>>();
        else if (key == "output")
            cfg.output = val.get<std::string>();
        else
            throw InputError("unknown config key: " + key);
    }
}

std::string config_hash(const RunConfig& cfg) {
    json j;
    j["action_scale"] = cfg.action_scale;
    j["balance_alpha_cv"] = cfg.balance_alpha_cv;
    j["balance_alpha_entropy"] = cfg.balance_alpha_entropy;
    j["curation_fraction"] = cfg.curation_fraction;
    j["inputs"] = cfg.inputs;
    j["kmeans_kmax"] = cfg.kmeans_kmax;
    j["output"] = cfg.output;
    j["patch_length"] = cfg.patch_length;
    j["seed"] = cfg.seed;
    j["softdtw_gamma"] = cfg.softdtw_gamma;
    std::string canon = j.dump();
    uint64_t h = fnv1a64(canon);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

// ---------------------------------------------------------------- profile

std::vector<std::string> collect_inputs(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".csv")
                    files.push_back(e.path().string());
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw InputError("input not found: " + p);
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

struct FileProfile {
    std::vector<std::string> rows;
    size_t failed = 0;
    std::string input_error;
};

FileProfile profile_one(const std::string& path) {
    FileProfile out;
    try {
        MultivariateSeries s = read_series_csv(path);
        std::string series_id = fs::path(path).stem().string();
        std::string source_id = fs::path(path).parent_path().filename().string();
        if (source_id.empty()) source_id = ".";
        std::string prefix = "{\"series\":\"" + json_escape(series_id) + "\",\"source\":\"" +
                             json_escape(source_id) + "\",\"channel\":\"";
        for (size_t ch : s.obs_indices()) {
            std::string row = prefix + json_escape(s.channel_names[ch]) + "\"";
            try {
                ChaosProfile p = chaos_profile(s.values[ch]);
                row += ",\"dfa\":" + format_g9(p.dfa);
                row += ",\"lyapunov\":" + format_g9(p.lyapunov);
                row += ",\"pe_h0\":" + format_g9(p.pe_h0);
                row += ",\"pe_h1\":" + format_g9(p.pe_h1);
            } catch (const NumericError& e) {
                row += ",\"error\":\"" + json_escape(e.what()) + "\"";
                ++out.failed;
            }
            out.rows.push_back(row + "}");
        }
    } catch (const InputError& e) {
        out.input_error = path + ": " + e.what();
    }
    return out;
}

size_t resolve_workers(int flag_value) {
    if (flag_value > 0) return static_cast<size_t>(flag_value);
    if (const char* env = std::getenv("CHAOSFORGE_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<size_t>(v);
    }
    return 1;
}

int cmd_profile(const RunConfig& cfg, size_t workers) {
    std::vector<std::string> files = collect_inputs(cfg.inputs);
    if (files.empty()) throw InputError("profile: no input series files");

    std::vector<FileProfile> results(files.size());
    if (workers <= 1 || files.size() == 1) {
        for (size_t i = 0; i < files.size(); ++i) results[i] = profile_one(files[i]);
    } else {
        std::atomic<size_t> next{0};
        auto run = [&] {
            for (size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1))
                results[i] = profile_one(files[i]);
        };
        std::vector<std::thread> pool;
        for (size_t w = 0; w < std::min(workers, files.size()); ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }

    for (const auto& r : results)
        if (!r.input_error.empty()) throw InputError("profile: " + r.input_error);

    size_t total = 0, failed = 0;
    std::string content = "{\"meta\":" + meta_json(cfg.seed, config_hash(cfg)) + "}\n";
    for (const auto& r : results) {
        for (const auto& row : r.rows) content += row + "\n";
        total += r.rows.size();
        failed += r.failed;
    }
    atomic_write(cfg.output, content);
    if (total > 0 && failed == total) {
        std::cerr << "profile: all " << total << " rows failed\n";
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------- cluster

std::vector<MetricVector> read_profiles_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read profiles: " + path);
    struct Acc {
        double dfa = 0, lyap = 0, h0 = 0, h1 = 0;
        size_t n = 0;
        size_t order = 0;
        std::string source;
    };
    std::map<std::string, Acc> acc;
    size_t order = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError("profiles parse error in " + path + ": " + e.what());
        }
        if (j.contains("meta")) continue;
        if (j.contains("error")) continue;
        std::string key = j.at("series").get<std::string>();
        std::string src = j.value("source", std::string("."));
        Acc& a = acc[src + "\x1f" + key];
        if (a.n == 0) {
            a.order = order++;
            a.source = src;
        }
        a.dfa += j.at("dfa").get<double>();
        a.lyap += j.at("lyapunov").get<double>();
        a.h0 += j.at("pe_h0").get<double>();
        a.h1 += j.at("pe_h1").get<double>();
        ++a.n;
    }
    std::vector<std::pair<size_t, MetricVector>> rows;
    for (const auto& [key, a] : acc) {
        MetricVector v;
        v.sample_id = key.substr(key.find('\x1f') + 1);
        v.source_id = a.source;
        v.dfa = a.dfa / static_cast<double>(a.n);
        v.lyapunov = a.lyap / static_cast<double>(a.n);
        v.pe_h0 = a.h0 / static_cast<double>(a.n);
        v.pe_h1 = a.h1 / static_cast<double>(a.n);
        rows.emplace_back(a.order, v);
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<MetricVector> out;
    for (auto& [_, v] : rows) out.push_back(std::move(v));
    return out;
}

json clustering_to_json(const RegimeClustering& rc) {
    json j;
    j["k_optimal"] = rc.k_optimal;
    j["k_star"] = rc.k_star;
    j["seed"] = rc.seed;
    json cents = json::array();
    for (size_t c = 0; c < rc.k_star; ++c)
        cents.push_back({{"dfa", rc.fit.centroids[c * 4 + 0]},
                         {"lyapunov", rc.fit.centroids[c * 4 + 1]},
                         {"pe_h0", rc.fit.centroids[c * 4 + 2]},
                         {"pe_h1", rc.fit.centroids[c * 4 + 3]}});
    j["centroids"] = cents;
    j["labels"] = rc.labels;
    j["regimes"] = rc.regimes;
    return j;
}

int cmd_cluster(const RunConfig& cfg, const std::string& samples_csv) {
    if (cfg.inputs.size() != 1) throw InputError("cluster: exactly one profiles JSONL expected");
    std::vector<MetricVector> samples = read_profiles_jsonl(cfg.inputs[0]);
    if (samples.empty()) throw InputError("cluster: no usable profile rows");
    RegimeClustering rc = cluster_regimes(samples, cfg.seed, cfg.kmeans_kmax);

    json j = clustering_to_json(rc);
    j["meta"] = json::parse(meta_json(cfg.seed, config_hash(cfg)));
    atomic_write(cfg.output, j.dump(2) + "\n");

    std::string csv = "# " + meta_json(cfg.seed, config_hash(cfg)) + "\n";
    csv += "sample_id,source_id,regime\n";
    for (size_t i = 0; i < samples.size(); ++i)
        csv += samples[i].sample_id + "," + samples[i].source_id + "," +
               rc.labels[rc.fit.assignments[i]] + "\n";
    atomic_write(samples_csv, csv);
    return 0;
}

// ---------------------------------------------------------------- balance

std::vector<LabeledSample> read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read samples CSV: " + path);
    std::vector<LabeledSample> out;
    std::string line;
    bool header_seen = false;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        LabeledSample s;
        if (!std::getline(ss, s.sample_id, ',') || !std::getline(ss, s.source_id, ',') ||
            !std::getline(ss, s.regime))
            throw InputError(path + ":" + std::to_string(lineno) + ": expected 3 fields");
        out.push_back(std::move(s));
    }
    if (out.empty()) throw InputError("samples CSV has no rows: " + path);
    return out;
}

std::map<std::string, size_t> regime_counts(const std::vector<LabeledSample>& samples) {
    std::map<std::string, size_t> counts;
    for (const auto& s : samples) ++counts[s.regime];
    return counts;
}

json report_to_json(const BalanceReport& r, const std::map<std::string, size_t>& counts) {
    json j;
    j["counts"] = counts;
    j["probs"] = r.probs;
    j["h_nats"] = r.h_nats;
    j["h_norm"] = r.h_norm;
    j["granularity"] = r.granularity;
    j["b_entropy"] = r.b_entropy;
    j["b_cv"] = r.b_cv;
    j["reference_regimes"] = r.reference_regimes;
    return j;
}

int cmd_balance_score(const RunConfig& cfg, size_t ref) {
    if (cfg.inputs.size() != 1) throw InputError("balance score: one samples CSV expected");
    auto samples = read_samples_csv(cfg.inputs[0]);
    auto counts = regime_counts(samples);
    size_t reference = ref > 0 ? ref : counts.size();
    std::vector<size_t> c;
    for (const auto& [_, v] : counts) c.push_back(v);
    BalanceReport r =
        balance_report(c, reference, cfg.balance_alpha_entropy, cfg.balance_alpha_cv);
    json j = report_to_json(r, counts);
    j["meta"] = json::parse(meta_json(cfg.seed, config_hash(cfg)));
    atomic_write(cfg.output, j.dump(2) + "\n");
    return 0;
}

int cmd_balance_curate(const RunConfig& cfg, const std::string& metric,
                       const std::string& trajectory_path) {
    if (cfg.inputs.size() != 1) throw InputError("curate: one samples CSV expected");
    auto samples = read_samples_csv(cfg.inputs[0]);
    BalanceMetric m = metric == "cv" ? BalanceMetric::cv : BalanceMetric::entropy;
    CurationResult res = curate_subset(samples, cfg.seed, cfg.curation_fraction, m);

    std::string meta = "# " + meta_json(cfg.seed, config_hash(cfg)) + "\n";
    std::string sel = meta + "sample_id\n";
    for (const auto& id : res.selected) sel += id + "\n";
    atomic_write(cfg.output, sel);

    std::string traj = meta + "step,score\n";
    for (size_t i = 0; i < res.trajectory.size(); ++i)
        traj += std::to_string(i) + "," + format_double(res.trajectory[i]) + "\n";
    atomic_write(trajectory_path, traj);
    return 0;
}

// ---------------------------------------------------------------- simulate

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
    std::map<std::string, double> out;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw InputError("simulate: bad --param, expected key=value: " + kv);
        try {
            out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw InputError("simulate: bad numeric value in --param: " + kv);
        }
    }
    return out;
}

void check_param_keys(const std::map<std::string, double>& p,
                      const std::vector<std::string>& allowed) {
    for (const auto& [k, _] : p)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw InputError("simulate: unknown parameter: " + k);
}

int cmd_simulate(const RunConfig& cfg, const std::string& system,
                 const std::vector<std::string>& params, size_t steps, double dt,
                 bool dt_given) {
    auto p = parse_params(params);
    auto get = [&](const std::string& k, double dflt) {
        auto it = p.find(k);
        return it == p.end() ? dflt : it->second;
    };
    MultivariateSeries s;
    if (system == "vdp") {
        check_param_keys(p, {"mu", "a", "omega", "x0", "v0"});
        VdpSpec spec;
        spec.mu = get("mu", spec.mu);
        spec.a = get("a", spec.a);
        spec.omega = get("omega", spec.omega);
        spec.dt = dt_given ? dt : spec.dt;
        spec.steps = steps;
        if (p.count("x0") || p.count("v0")) {
            spec.x0 = get("x0", spec.x0);
            spec.v0 = get("v0", spec.v0);
        } else {
            Rng rng = Rng(cfg.seed).fork("init");
            spec.x0 += 1e-2 * rng.gaussian();
            spec.v0 += 1e-2 * rng.gaussian();
        }
        s = integrate_vdp(spec);
    } else if (system == "lorenz") {
        check_param_keys(p, {"sigma", "rho", "beta", "x0", "y0", "z0", "transient", "stride"});
        LorenzSpec spec;
        spec.sigma = get("sigma", spec.sigma);
        spec.rho = get("rho", spec.rho);
        spec.beta = get("beta", spec.beta);
        spec.dt = dt_given ? dt : spec.dt;
        spec.steps = steps;
        spec.transient = static_cast<size_t>(get("transient", 0));
        spec.stride = static_cast<size_t>(get("stride", 1));
        if (p.count("x0") || p.count("y0") || p.count("z0")) {
            spec.x0 = get("x0", spec.x0);
            spec.y0 = get("y0", spec.y0);
            spec.z0 = get("z0", spec.z0);
        } else {
            Rng rng = Rng(cfg.seed).fork("init");
            spec.x0 += 0.1 * rng.gaussian();
            spec.y0 += 0.1 * rng.gaussian();
            spec.z0 += 0.1 * rng.gaussian();
        }
        s = integrate_lorenz(spec);
    } else if (system == "logistic") {
        check_param_keys(p, {"r", "x0"});
        s.channel_names = {"x"};
        s.roles = {Role::observation};
        s.values = {logistic_map(get("r", 4.0), get("x0", 0.4), steps)};
        s.dt = dt_given ? dt : 1.0;
    } else {
        throw InputError("simulate: unknown system: " + system);
    }
    write_series_csv(cfg.output, s, meta_json(cfg.seed, config_hash(cfg)));
    return 0;
}

// ---------------------------------------------------------------- forecast

json eval_to_json(const EvalReport& r) {
    json j;
    j["mae"] = r.mae;
    j["soft_dtw"] = r.soft_dtw;
    j["freq_cos_sim"] = r.freq_cos_sim;
    j["freq_eucl"] = r.freq_eucl;
    j["latent_cos_sim"] = r.latent_cos_sim;
    j["latent_eucl"] = r.latent_eucl;
    j["final_score"] = r.final_score;
    j["pred_length"] = r.pred_length;
    j["embed_size"] = r.embed_size;
    j["gamma"] = r.gamma;
    return j;
}

std::vector<std::vector<double>> obs_matrix(const MultivariateSeries& s,
                                            const std::vector<std::string>& expected_names,
                                            const char* what) {
    auto obs = s.obs_indices();
    if (obs.size() != expected_names.size())
        throw InputError(std::string(what) + ": observation channel count mismatch");
    std::vector<std::vector<double>> out;
    for (size_t i = 0; i < obs.size(); ++i) {
        if (s.channel_names[obs[i]] != expected_names[i])
            throw InputError(std::string(what) + ": channel name mismatch: expected " +
                             expected_names[i] + ", got " + s.channel_names[obs[i]]);
        out.push_back(s.values[obs[i]]);
    }
    return out;
}

MultivariateSeries matrix_to_series(const std::vector<std::vector<double>>& m,
                                    const std::vector<std::string>& names, double dt) {
    MultivariateSeries s;
    s.channel_names = names;
    s.roles.assign(names.size(), Role::observation);
    s.values = m;
    s.dt = dt;
    return s;
}

int cmd_forecast(const RunConfig& cfg, const std::string& context_path,
                 const std::string& actions_path, const std::string& truth_path,
                 const std::string& model_path, const std::string& report_path, size_t horizon,
                 const std::string& mode_name) {
    if (horizon < 1) throw InputError("forecast: horizon must be >= 1");
    ForecastMode mode;
    if (mode_name == "argmax")
        mode = ForecastMode::argmax;
    else if (mode_name == "sample")
        mode = ForecastMode::sample;
    else
        throw InputError("forecast: mode must be argmax or sample");

    MultivariateSeries ctx = read_series_csv(context_path);
    const size_t P = cfg.patch_length;
    TransitionModel model = fit_transition_model(ctx, P, cfg.action_scale, cfg.seed);
    const size_t start = model.state_sequence.back();
    const size_t hp = (horizon + P - 1) / P;
    uint64_t fseed = Rng(cfg.seed).fork("forecast").base_seed();

    LatentForecast fc;
    if (!actions_path.empty()) {
        MultivariateSeries fut = read_series_csv(actions_path, false);
        // future action patches aligned to the forecast window
        std::vector<size_t> act_ch;
        for (const auto& name : model.act_names) {
            auto it = std::find(fut.channel_names.begin(), fut.channel_names.end(), name);
            if (it == fut.channel_names.end())
                throw InputError("forecast: action channel missing from --actions: " + name);
            act_ch.push_back(static_cast<size_t>(it - fut.channel_names.begin()));
        }
        size_t need = hp > 1 ? (hp - 1) * P : 0;
        if (fut.length() < need)
            throw InputError("forecast: --actions shorter than the forecast window");
        std::vector<std::vector<double>> patches;
        for (size_t f = 0; hp > 1 && f < hp - 1; ++f) {
            std::vector<double> patch;
            patch.reserve(act_ch.size() * P);
            for (size_t c : act_ch) {
                const auto& v = fut.values[c];
                for (size_t i = 0; i < P; ++i) patch.push_back(v[f * P + i]);
            }
            patches.push_back(std::move(patch));
        }
        fc = action_conditioned_forecast(model, start, patches, hp, mode, fseed);
    } else {
        fc = forecast_latent(model, start, hp, mode, fseed);
    }

    std::vector<std::vector<double>> decoded = fc.decoded;
    for (auto& ch : decoded) ch.resize(horizon);
    write_series_csv(cfg.output, matrix_to_series(decoded, model.obs_names, ctx.dt),
                     meta_json(cfg.seed, config_hash(cfg)));

    if (!model_path.empty()) {
        json jm = json::parse(model_to_json(model));
        jm["meta"] = json::parse(meta_json(cfg.seed, config_hash(cfg)));
        atomic_write(model_path, jm.dump(2) + "\n");
    }

    if (!truth_path.empty()) {
        MultivariateSeries truth = read_series_csv(truth_path);
        auto truth_m = obs_matrix(truth, model.obs_names, "forecast --truth");
        if (truth.length() != horizon)
            throw InputError("forecast: truth length must equal the horizon");
        json j;
        j["meta"] = json::parse(meta_json(cfg.seed, config_hash(cfg)));
        j["horizon"] = horizon;
        j["insight"] = eval_to_json(evaluate(ctx, truth_m, decoded, cfg.softdtw_gamma, P));
        j["naive"] = eval_to_json(
            evaluate(ctx, truth_m, naive_forecast(ctx, horizon), cfg.softdtw_gamma, P));
        j["seasonal_naive"] = eval_to_json(evaluate(
            ctx, truth_m, seasonal_naive_forecast(ctx, horizon), cfg.softdtw_gamma, P));
        if (fc.fallback) j["action_fallback"] = true;
        atomic_write(report_path, j.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const RunConfig& cfg, const std::string& context_path,
                 const std::string& truth_path, const std::string& pred_path,
                 const std::string& manifest_path) {
    if (!manifest_path.empty()) {
        std::ifstream in(manifest_path);
        if (!in) throw InputError("cannot read manifest: " + manifest_path);
        std::string line;
        std::vector<std::array<std::string, 3>> rows;
        size_t lineno = 0;
        bool header_seen = false;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            if (!header_seen) {
                header_seen = true;
                continue;
            }
            std::stringstream ss(line);
            std::array<std::string, 3> r;
            if (!std::getline(ss, r[0], ',') || !std::getline(ss, r[1], ',') ||
                !std::getline(ss, r[2]))
                throw InputError(manifest_path + ":" + std::to_string(lineno) +
                                 ": expected context,truth,pred");
            rows.push_back(std::move(r));
        }
        if (rows.empty()) throw InputError("evaluate: empty manifest");

        std::string content = "{\"meta\":" + meta_json(cfg.seed, config_hash(cfg)) + "}\n";
        EvalReport agg;
        for (const auto& r : rows) {
            MultivariateSeries ctx = read_series_csv(r[0]);
            MultivariateSeries truth = read_series_csv(r[1]);
            MultivariateSeries pred = read_series_csv(r[2]);
            std::vector<std::string> names;
            for (size_t ch : ctx.obs_indices()) names.push_back(ctx.channel_names[ch]);
            EvalReport rep =
                evaluate(ctx, obs_matrix(truth, names, "evaluate"),
                         obs_matrix(pred, names, "evaluate"), cfg.softdtw_gamma,
                         cfg.patch_length);
            json j = eval_to_json(rep);
            j["context"] = r[0];
            j["truth"] = r[1];
            j["pred"] = r[2];
            content += j.dump() + "\n";
            agg.mae += rep.mae;
            agg.soft_dtw += rep.soft_dtw;
            agg.freq_cos_sim += rep.freq_cos_sim;
            agg.freq_eucl += rep.freq_eucl;
            agg.latent_cos_sim += rep.latent_cos_sim;
            agg.latent_eucl += rep.latent_eucl;
            agg.final_score += rep.final_score;
        }
        double n = static_cast<double>(rows.size());
        json ja;
        ja["aggregate"] = true;
        ja["samples"] = rows.size();
        ja["mae"] = agg.mae / n;
        ja["soft_dtw"] = agg.soft_dtw / n;
        ja["freq_cos_sim"] = agg.freq_cos_sim / n;
        ja["freq_eucl"] = agg.freq_eucl / n;
        ja["latent_cos_sim"] = agg.latent_cos_sim / n;
        ja["latent_eucl"] = agg.latent_eucl / n;
        ja["final_score"] = agg.final_score / n;
        content += ja.dump() + "\n";
        atomic_write(cfg.output, content);
        return 0;
    }

    MultivariateSeries ctx = read_series_csv(context_path);
    MultivariateSeries truth = read_series_csv(truth_path);
    MultivariateSeries pred = read_series_csv(pred_path);
    std::vector<std::string> names;
    for (size_t ch : ctx.obs_indices()) names.push_back(ctx.channel_names[ch]);
    EvalReport rep = evaluate(ctx, obs_matrix(truth, names, "evaluate"),
                              obs_matrix(pred, names, "evaluate"), cfg.softdtw_gamma,
                              cfg.patch_length);
    json j = eval_to_json(rep);
    j["meta"] = json::parse(meta_json(cfg.seed, config_hash(cfg)));
    atomic_write(cfg.output, j.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- pipeline

int cmd_pipeline(RunConfig cfg, size_t workers, size_t ref, bool do_curate,
                 const std::string& metric) {
    if (cfg.output.empty()) throw InputError("pipeline: output directory required");
    fs::create_directories(cfg.output);
    fs::path outdir(cfg.output);

    RunConfig pcfg = cfg;
    pcfg.output = (outdir / "profiles.jsonl").string();
    int rc = cmd_profile(pcfg, workers);
    if (rc != 0) return rc;

    RunConfig ccfg = cfg;
    ccfg.inputs = {pcfg.output};
    ccfg.output = (outdir / "clusters.json").string();
    cmd_cluster(ccfg, (outdir / "samples.csv").string());

    auto samples = read_samples_csv((outdir / "samples.csv").string());
    auto counts = regime_counts(samples);
    size_t reference = ref > 0 ? ref : counts.size();
    std::vector<size_t> c;
    for (const auto& [_, v] : counts) c.push_back(v);
    BalanceReport orig =
        balance_report(c, reference, cfg.balance_alpha_entropy, cfg.balance_alpha_cv);
    json jb;
    jb["meta"] = json::parse(meta_json(cfg.seed, config_hash(cfg)));
    jb["original"] = report_to_json(orig, counts);

    if (do_curate) {
        BalanceMetric m = metric == "cv" ? BalanceMetric::cv : BalanceMetric::entropy;
        CurationResult res = curate_subset(samples, cfg.seed, cfg.curation_fraction, m);
        std::string meta = "# " + meta_json(cfg.seed, config_hash(cfg)) + "\n";
        std::string sel = meta + "sample_id\n";
        for (const auto& id : res.selected) sel += id + "\n";
        atomic_write((outdir / "curated.csv").string(), sel);
        std::string traj = meta + "step,score\n";
        for (size_t i = 0; i < res.trajectory.size(); ++i)
            traj += std::to_string(i) + "," + format_double(res.trajectory[i]) + "\n";
        atomic_write((outdir / "curated.traj.csv").string(), traj);

        std::map<std::string, size_t> cur_counts;
        {
            std::map<std::string, std::string> regime_of;
            for (const auto& s : samples) regime_of[s.sample_id] = s.regime;
            for (const auto& id : res.selected) ++cur_counts[regime_of[id]];
        }
        BalanceComparison cmp = compare_balance(counts, cur_counts);
        jb["curated"] = report_to_json(cmp.b, cur_counts);
        jb["comparison"] = {{"reference_regimes", cmp.a.reference_regimes},
                            {"original_b_entropy", cmp.a.b_entropy},
                            {"curated_b_entropy", cmp.b.b_entropy},
                            {"ordering", cmp.ordering < 0 ? "curated_higher"
                                         : cmp.ordering > 0 ? "original_higher"
                                                            : "tie"}};
    }
    atomic_write((outdir / "balance.json").string(), jb.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chaos-metric profiling, regime curation and latent-transition forecasting"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    int workers_flag = 0;
    app.add_option("--config", config_path, "JSON config file; flags override its fields");

    // shared flag storage; each subcommand wires the subset it honors
    uint64_t seed_flag = 0;
    size_t patch_flag = 16, kmax_flag = 16;
    double gamma_flag = 1.0, frac_flag = 0.5, beta_flag = 1.0;

    auto add_seed = [&](CLI::App* s) { return s->add_option("--seed", seed_flag, "RNG seed"); };

    // profile
    auto* sp = app.add_subcommand("profile", "chaos-metric profiles for series CSVs");
    std::vector<std::string> profile_inputs;
    std::string profile_out;
    sp->add_option("inputs", profile_inputs, "series CSV files or directories")->required();
    sp->add_option("-o,--out", profile_out, "output JSONL path")->required();
    auto* sp_seed = add_seed(sp);
    sp->add_option("--workers", workers_flag, "worker threads (default CHAOSFORGE_WORKERS or 1)");

    // cluster
    auto* sc = app.add_subcommand("cluster", "regime clustering over profile rows");
    std::string cluster_profiles, cluster_out, cluster_samples;
    sc->add_option("--profiles", cluster_profiles, "profiles JSONL")->required();
    sc->add_option("-o,--out", cluster_out, "clustering JSON path")->required();
    sc->add_option("--samples-csv", cluster_samples, "per-sample regime CSV path");
    auto* sc_seed = add_seed(sc);
    auto* sc_kmax = sc->add_option("--kmax", kmax_flag, "cluster count cap");

    // balance score|curate
    auto* sb = app.add_subcommand("balance", "regime-distribution balance scoring");
    sb->require_subcommand(1);
    auto* sbs = sb->add_subcommand("score", "score a regime CSV");
    std::string bal_samples, bal_out;
    size_t bal_ref = 0;
    sbs->add_option("--regimes", bal_samples, "per-sample regime CSV")->required();
    sbs->add_option("-o,--out", bal_out, "report JSON path")->required();
    sbs->add_option("--ref", bal_ref, "reference regime count (default: observed)");
    auto* sbc = sb->add_subcommand("curate", "balance-aware subset curation");
    std::string cur_samples, cur_out, cur_traj, cur_metric = "entropy";
    sbc->add_option("--regimes", cur_samples, "per-sample regime CSV")->required();
    sbc->add_option("-o,--out", cur_out, "selected ids CSV path")->required();
    sbc->add_option("--trajectory", cur_traj, "score trajectory CSV path");
    auto* sbc_frac = sbc->add_option("--frac", frac_flag, "target fraction of |D|");
    sbc->add_option("--metric", cur_metric, "entropy or cv")
        ->check(CLI::IsMember({"entropy", "cv"}));
    auto* sbc_seed = add_seed(sbc);

    // curate (alias for balance curate)
    auto* scu = app.add_subcommand("curate", "balance-aware subset curation");
    std::string cur2_samples, cur2_out, cur2_traj, cur2_metric = "entropy";
    scu->add_option("--regimes", cur2_samples, "per-sample regime CSV")->required();
    scu->add_option("-o,--out", cur2_out, "selected ids CSV path")->required();
    scu->add_option("--trajectory", cur2_traj, "score trajectory CSV path");
    auto* scu_frac = scu->add_option("--frac", frac_flag, "target fraction of |D|");
    scu->add_option("--metric", cur2_metric, "entropy or cv")
        ->check(CLI::IsMember({"entropy", "cv"}));
    auto* scu_seed = add_seed(scu);

    // simulate
    auto* ss = app.add_subcommand("simulate", "synthetic dynamical-system series");
    std::string sim_system, sim_out;
    std::vector<std::string> sim_params;
    size_t sim_steps = 4096;
    double sim_dt = 0.0;
    ss->add_option("--system", sim_system, "vdp, lorenz or logistic")->required();
    ss->add_option("--param", sim_params, "system parameter key=value (repeatable)");
    ss->add_option("--steps", sim_steps, "sample count");
    auto* ss_dt = ss->add_option("--dt", sim_dt, "integration step");
    ss->add_option("-o,--out", sim_out, "series CSV path")->required();
    auto* ss_seed = add_seed(ss);

    // forecast
    auto* sf = app.add_subcommand("forecast", "latent-transition forecast from a context");
    std::string fc_context, fc_actions, fc_truth, fc_model, fc_report, fc_mode = "argmax";
    std::string fc_out;
    size_t fc_horizon = 0;
    sf->add_option("--context", fc_context, "context series CSV")->required();
    sf->add_option("--horizon", fc_horizon, "forecast length in samples")->required();
    sf->add_option("--mode", fc_mode, "argmax or sample")
        ->check(CLI::IsMember({"argmax", "sample"}));
    sf->add_option("--actions", fc_actions, "future action series CSV");
    sf->add_option("--truth", fc_truth, "ground-truth future CSV (enables the report)");
    sf->add_option("--model", fc_model, "transition model JSON path");
    sf->add_option("--report", fc_report, "evaluation report JSON path");
    sf->add_option("-o,--out", fc_out, "forecast series CSV path")->required();
    auto* sf_seed = add_seed(sf);
    auto* sf_patch = sf->add_option("--patch-size", patch_flag, "patch length P");
    auto* sf_beta = sf->add_option("--beta", beta_flag, "action scale");
    auto* sf_gamma = sf->add_option("--gamma", gamma_flag, "SoftDTW temperature");

    // evaluate
    auto* se = app.add_subcommand("evaluate", "forecast evaluation protocol");
    std::string ev_context, ev_truth, ev_pred, ev_manifest, ev_out;
    se->add_option("--context", ev_context, "context series CSV");
    se->add_option("--truth", ev_truth, "ground-truth future CSV");
    se->add_option("--pred", ev_pred, "forecast CSV");
    se->add_option("--manifest", ev_manifest, "batch manifest CSV (context,truth,pred)");
    se->add_option("-o,--out", ev_out, "report path (JSON, or JSONL in batch mode)")
        ->required();
    auto* se_seed = add_seed(se);
    auto* se_patch = se->add_option("--patch-size", patch_flag, "patch length P");
    auto* se_gamma = se->add_option("--gamma", gamma_flag, "SoftDTW temperature");

    // pipeline
    auto* spl = app.add_subcommand("pipeline", "profile, cluster, balance and curate");
    std::vector<std::string> pl_inputs;
    std::string pl_out, pl_metric = "entropy";
    size_t pl_ref = 0;
    bool pl_curate = false;
    spl->add_option("--inputs", pl_inputs, "series CSV files or directories")->required();
    spl->add_option("-o,--out", pl_out, "output directory")->required();
    spl->add_option("--ref", pl_ref, "reference regime count (default: observed)");
    spl->add_flag("--curate", pl_curate, "also curate a balanced subset");
    auto* spl_frac = spl->add_option("--frac", frac_flag, "curation fraction");
    spl->add_option("--metric", pl_metric, "entropy or cv")
        ->check(CLI::IsMember({"entropy", "cv"}));
    auto* spl_seed = add_seed(spl);
    auto* spl_kmax = spl->add_option("--kmax", kmax_flag, "cluster count cap");
    spl->add_option("--workers", workers_flag, "worker threads");

    try {
        app.parse(argc, argv);

        if (!config_path.empty()) load_config_file(cfg, config_path);
        auto take_seed = [&](CLI::Option* o) {
            if (o->count()) cfg.seed = seed_flag;
        };

        if (app.got_subcommand(sp)) {
            take_seed(sp_seed);
            cfg.inputs = profile_inputs;
            cfg.output = profile_out;
            return cmd_profile(cfg, resolve_workers(workers_flag));
        }
        if (app.got_subcommand(sc)) {
            take_seed(sc_seed);
            if (sc_kmax->count()) cfg.kmeans_kmax = kmax_flag;
            cfg.inputs = {cluster_profiles};
            cfg.output = cluster_out;
            if (cluster_samples.empty())
                cluster_samples = fs::path(cluster_out).replace_extension(".samples.csv").string();
            return cmd_cluster(cfg, cluster_samples);
        }
        if (app.got_subcommand(sb)) {
            if (sb->got_subcommand(sbs)) {
                cfg.inputs = {bal_samples};
                cfg.output = bal_out;
                return cmd_balance_score(cfg, bal_ref);
            }
            take_seed(sbc_seed);
            if (sbc_frac->count()) cfg.curation_fraction = frac_flag;
            cfg.inputs = {cur_samples};
            cfg.output = cur_out;
            if (cur_traj.empty())
                cur_traj = fs::path(cur_out).replace_extension(".traj.csv").string();
            return cmd_balance_curate(cfg, cur_metric, cur_traj);
        }
        if (app.got_subcommand(scu)) {
            take_seed(scu_seed);
            if (scu_frac->count()) cfg.curation_fraction = frac_flag;
            cfg.inputs = {cur2_samples};
            cfg.output = cur2_out;
            if (cur2_traj.empty())
                cur2_traj = fs::path(cur2_out).replace_extension(".traj.csv").string();
            return cmd_balance_curate(cfg, cur2_metric, cur2_traj);
        }
        if (app.got_subcommand(ss)) {
            take_seed(ss_seed);
            cfg.inputs = {};
            cfg.output = sim_out;
            return cmd_simulate(cfg, sim_system, sim_params, sim_steps, sim_dt,
                                ss_dt->count() > 0);
        }
        if (app.got_subcommand(sf)) {
            take_seed(sf_seed);
            if (sf_patch->count()) cfg.patch_length = patch_flag;
            if (sf_beta->count()) cfg.action_scale = beta_flag;
            if (sf_gamma->count()) cfg.softdtw_gamma = gamma_flag;
            cfg.inputs = {fc_context};
            if (!fc_actions.empty()) cfg.inputs.push_back(fc_actions);
            if (!fc_truth.empty()) cfg.inputs.push_back(fc_truth);
            cfg.output = fc_out;
            if (!fc_truth.empty() && fc_report.empty())
                fc_report = fs::path(fc_out).replace_extension(".report.json").string();
            return cmd_forecast(cfg, fc_context, fc_actions, fc_truth, fc_model, fc_report,
                                fc_horizon, fc_mode);
        }
        if (app.got_subcommand(se)) {
            take_seed(se_seed);
            if (se_patch->count()) cfg.patch_length = patch_flag;
            if (se_gamma->count()) cfg.softdtw_gamma = gamma_flag;
            if (ev_manifest.empty() && (ev_context.empty() || ev_truth.empty() || ev_pred.empty()))
                throw InputError("evaluate: need --manifest or all of --context/--truth/--pred");
            cfg.inputs = ev_manifest.empty()
                             ? std::vector<std::string>{ev_context, ev_truth, ev_pred}
                             : std::vector<std::string>{ev_manifest};
            cfg.output = ev_out;
            return cmd_evaluate(cfg, ev_context, ev_truth, ev_pred, ev_manifest);
        }
        if (app.got_subcommand(spl)) {
            take_seed(spl_seed);
            if (spl_kmax->count()) cfg.kmeans_kmax = kmax_flag;
            if (spl_frac->count()) cfg.curation_fraction = frac_flag;
            cfg.inputs = pl_inputs;
            cfg.output = pl_out;
            return cmd_pipeline(cfg, resolve_workers(workers_flag), pl_ref, pl_curate,
                                pl_metric);
        }
        throw InputError("no subcommand given");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
