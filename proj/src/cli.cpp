#include "bplus/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bplus/dephasing.hpp"
#include "bplus/lat.hpp"
#include "bplus/markov.hpp"
#include "bplus/retro.hpp"
#include "bplus/rng.hpp"

namespace bplus {

using nlohmann::json;

namespace {

// Overlay `raw` on `defaults`, rejecting keys the defaults do not know and
// mismatched value kinds. Arrays of objects validate each element against the
// first default element.
json merge_validate(const json& defaults, const json& raw, const std::string& path) {
    if (!raw.is_object())
        throw std::invalid_argument("config: expected an object at '" + path + "'");
    json out = defaults;
    for (auto it = raw.begin(); it != raw.end(); ++it) {
        std::string where = path.empty() ? it.key() : path + "." + it.key();
        if (!defaults.contains(it.key()))
            throw std::invalid_argument("config: unknown key '" + where + "'");
        const json& def = defaults.at(it.key());
        const json& val = it.value();
        if (def.is_object()) {
            out[it.key()] = merge_validate(def, val, where);
        } else if (def.is_array()) {
            if (!val.is_array())
                throw std::invalid_argument("config: '" + where + "' must be an array");
            if (!def.empty() && def.front().is_object()) {
                json arr = json::array();
                for (std::size_t i = 0; i < val.size(); ++i)
                    arr.push_back(merge_validate(def.front(), val.at(i),
                                                 where + "[" + std::to_string(i) + "]"));
                out[it.key()] = arr;
            } else {
                out[it.key()] = val;
            }
        } else if (def.is_number() && !val.is_number()) {
            throw std::invalid_argument("config: '" + where + "' must be a number");
        } else if (def.is_string() && !val.is_string()) {
            throw std::invalid_argument("config: '" + where + "' must be a string");
        } else if (def.is_boolean() && !val.is_boolean()) {
            throw std::invalid_argument("config: '" + where + "' must be a boolean");
        } else {
            out[it.key()] = val;
        }
    }
    return out;
}

void require_enum(const json& config, const std::string& key,
                  const std::vector<std::string>& allowed) {
    std::string value = config.at(key).get<std::string>();
    for (const auto& a : allowed)
        if (value == a) return;
    std::string choices;
    for (const auto& a : allowed) choices += (choices.empty() ? "" : "|") + a;
    throw std::invalid_argument("config: '" + key + "' must be one of " + choices);
}

json defaults_for(const std::string& subcommand) {
    if (subcommand == "bplus") {
        return json{{"frame", "sic"}, {"d_bath", 2}, {"count", 20}, {"state", "random"}};
    }
    if (subcommand == "dephasing") {
        return json{{"eps", 1.0},
                    {"modes", json::array({json{{"omega", 1.0}, {"g", 0.2}}})},
                    {"bath", json{{"kind", "thermal"}, {"nbar", 0.5}, {"alpha", json::array({0.0, 0.0})}}},
                    {"scenario", "factorisable"},
                    {"entangled_alpha", json::array({1.0, 0.0})},
                    {"cutoff", 30},
                    {"t_max", 4.0 * M_PI},
                    {"points", 20},
                    {"oracle", true}};
    }
    if (subcommand == "lat") {
        return json{{"preset", "dipolar3q"},
                    {"menu", "full"},
                    {"probe_time", 1.0},
                    {"noise", json{{"mean", 0.0}, {"variance", 0.1}, {"realizations", 100}}},
                    {"repetitions_full", 50},
                    {"repetitions_base", 10}};
    }
    if (subcommand == "retro") {
        return json{{"gamma", 1.0},     {"s2", 1.0},           {"horizon", 5.0},
                    {"t_minus", -2.0},  {"trajectories", 10000}};
    }
    if (subcommand == "markov") {
        return json{{"demo", "semigroup"}, {"gamma", 0.3},    {"omega", 1.0},
                    {"points", 9},         {"t_max", 3.0},    {"restarts", 64},
                    {"iterations", 200}};
    }
    throw std::invalid_argument("config: unknown subcommand '" + subcommand + "'");
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

json table(const std::vector<std::string>& columns, std::vector<json> rows) {
    return json{{"columns", columns}, {"rows", rows}};
}

// --- subcommand runners -----------------------------------------------------

std::vector<ResultRecord> run_bplus_cmd(const RunConfig& rc, const json& config) {
    const std::string frame_name = config.at("frame").get<std::string>();
    const int d_bath = config.at("d_bath").get<int>();
    const int count = config.at("count").get<int>();
    const std::string state_kind = config.at("state").get<std::string>();

    PositiveFrame frame;
    DualFrame dual;
    if (frame_name == "sic") {
        CanonicalPOVM povm = qubit_sic_frame();
        frame = povm.frame;
        dual = povm.dual;
    } else if (frame_name == "pauli") {
        frame = qubit_pauli_frame();
        dual = dual_frame(frame, hermitian_basis(2));
    } else {
        frame = qubit_six_state_frame();
        dual = dual_frame(frame, hermitian_basis(2));
    }

    std::vector<json> rows;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        DensityOperator rho_sb = [&] {
            if (state_kind == "lat_preparation") {
                LatConfig preset = dipolar3q_preset(LatMenu::one_resonance_x, 0);
                return preset.initial_state;
            }
            Rng rng(derive_seed(rc.seed, static_cast<std::uint64_t>(i)));
            return DensityOperator::checked(random_density_matrix(2 * d_bath, rng));
        }();
        int db = rho_sb.dim() / 2;
        BPlusDecomposition decomp = decompose(rho_sb, frame, dual, 2, db);
        double residual = frob_diff(reconstruct(decomp), rho_sb.rho);
        worst = std::max(worst, residual);
        json row = json::array({i, residual});
        for (int a = 0; a < decomp.size(); ++a) row.push_back(decomp.weights(a));
        rows.push_back(row);
    }
    ResultRecord rec;
    rec.outputs = json{{"name", "decompositions"},
                       {"frame", frame_name},
                       {"count", count},
                       {"max_residual", worst}};
    std::vector<std::string> cols = {"index", "residual"};
    for (int a = 0; a < frame.size(); ++a) cols.push_back("w" + std::to_string(a));
    rec.outputs["table"] = table(cols, std::move(rows));
    return {rec};
}

std::vector<ResultRecord> run_dephasing_cmd(const RunConfig&, const json& config) {
    DephasingSpec spec;
    spec.eps = config.at("eps").get<double>();
    for (const auto& m : config.at("modes"))
        spec.modes.push_back({m.at("omega").get<double>(), m.at("g").get<double>()});
    require_enum(config, "scenario", {"factorisable", "entangled_coherent"});
    const int cutoff = config.at("cutoff").get<int>();
    const int points = config.at("points").get<int>();
    const double t_max = config.at("t_max").get<double>();
    const bool with_oracle = config.at("oracle").get<bool>();
    const std::string scenario = config.at("scenario").get<std::string>();

    DephasingInput input;
    DensityOperator joint{Mat::Identity(1, 1)};
    bool have_joint = false;
    const int levels = cutoff + 1;
    if (scenario == "factorisable") {
        require_enum(config.at("bath"), "kind", {"thermal", "coherent"});
        GaussianBathState bath;
        for (std::size_t j = 0; j < spec.modes.size(); ++j) {
            GaussianBathState::ModeState ms;
            if (config.at("bath").at("kind").get<std::string>() == "thermal") {
                ms.nbar = config.at("bath").at("nbar").get<double>();
            } else {
                ms.alpha = cplx(config.at("bath").at("alpha").at(0).get<double>(),
                                config.at("bath").at("alpha").at(1).get<double>());
            }
            bath.modes.push_back(ms);
        }
        Mat plus = Mat::Constant(2, 2, 0.5);
        DensityOperator rho_s = DensityOperator::checked(plus);
        input = dephasing_input(rho_s, bath);
        if (with_oracle && spec.modes.size() == 1) {
            DensityOperator rho_b = thermal_state(levels, bath.modes[0].nbar);
            if (config.at("bath").at("kind").get<std::string>() == "coherent") {
                Vec coh = coherent_state(levels, bath.modes[0].alpha);
                rho_b = DensityOperator::checked(Mat(coh * coh.adjoint()));
            }
            joint = DensityOperator::checked(tensor_product(rho_s.rho, rho_b.rho));
            have_joint = true;
        }
    } else {
        if (spec.modes.size() != 1)
            throw std::invalid_argument("config: entangled_coherent needs exactly one mode");
        cplx alpha(config.at("entangled_alpha").at(0).get<double>(),
                   config.at("entangled_alpha").at(1).get<double>());
        Vec up = coherent_state(levels, alpha);
        Vec down = coherent_state(levels, -alpha);
        Vec psi = Vec::Zero(2 * levels);
        psi.segment(0, levels) = up;
        psi.segment(levels, levels) = down;
        psi /= psi.norm();
        joint = DensityOperator::checked(Mat(psi * psi.adjoint()));
        have_joint = true;
        CanonicalPOVM sic = qubit_sic_frame();
        BPlusDecomposition decomp = decompose(joint, sic.frame, sic.dual, 2, levels);
        input = dephasing_input(decomp, cutoff, 1);
    }

    std::vector<json> rows;
    double worst_dev = 0.0;
    DephasingOracle oracle(spec, cutoff);
    for (int k = 0; k < points; ++k) {
        double t = t_max * k / std::max(1, points - 1);
        DensityOperator analytic = dephase_correlated(input, spec, t);
        cplx c = analytic.rho(0, 1);
        double oracle_abs = std::numeric_limits<double>::quiet_NaN();
        double dev = std::numeric_limits<double>::quiet_NaN();
        if (with_oracle && have_joint) {
            DensityOperator exact = oracle.evolve(joint, t);
            oracle_abs = std::abs(exact.rho(0, 1));
            dev = std::abs(std::abs(c) - oracle_abs);
            worst_dev = std::max(worst_dev, dev);
        }
        rows.push_back(json::array({t, c.real(), c.imag(), std::abs(c), oracle_abs, dev}));
    }
    ResultRecord rec;
    rec.outputs = json{{"name", "coherence"},
                       {"scenario", scenario},
                       {"max_abs_deviation", worst_dev},
                       {"table", table({"time", "coherence_re", "coherence_im",
                                        "coherence_abs", "oracle_abs", "abs_deviation"},
                                       std::move(rows))}};
    return {rec};
}

std::vector<ResultRecord> run_lat_cmd(const RunConfig& rc, const json& config) {
    require_enum(config, "preset", {"dipolar3q"});
    require_enum(config, "menu", {"one_resonance_x", "two_resonance_x", "full", "all"});
    std::vector<LatMenu> menus;
    const std::string menu = config.at("menu").get<std::string>();
    if (menu == "one_resonance_x" || menu == "all") menus.push_back(LatMenu::one_resonance_x);
    if (menu == "two_resonance_x" || menu == "all") menus.push_back(LatMenu::two_resonance_x);
    if (menu == "full" || menu == "all") menus.push_back(LatMenu::full);

    std::vector<json> rows;
    std::vector<ResultRecord> records;
    for (LatMenu m : menus) {
        LatConfig lat = dipolar3q_preset(m, rc.seed, config.at("repetitions_full").get<int>(),
                                         config.at("repetitions_base").get<int>());
        lat.probe_time = config.at("probe_time").get<double>();
        lat.noise.mean = config.at("noise").at("mean").get<double>();
        lat.noise.variance = config.at("noise").at("variance").get<double>();
        lat.noise.realizations = config.at("noise").at("realizations").get<int>();
        EstimationResult est = run_lat(lat, rc.jobs);
        int reps = (m == LatMenu::full) ? config.at("repetitions_full").get<int>()
                                        : config.at("repetitions_base").get<int>();
        rows.push_back(json::array({est.menu_name, reps, est.condition_number,
                                    est.fidelity_joint, est.fidelity_probe}));
        ResultRecord rec;
        rec.outputs = json{{"name", est.menu_name},
                           {"menu", est.menu_name},
                           {"condition_number", est.condition_number},
                           {"design_rank", est.design_rank},
                           {"F_SB", est.fidelity_joint},
                           {"F_S", est.fidelity_probe},
                           {"F_SB_t0", est.fidelity_joint_t0}};
        records.push_back(std::move(rec));
    }
    ResultRecord summary;
    summary.outputs =
        json{{"name", "summary"},
             {"table", table({"menu", "M", "condition_number", "F_SB", "F_S"}, std::move(rows))}};
    records.push_back(std::move(summary));
    return records;
}

std::vector<ResultRecord> run_retro_cmd(const RunConfig& rc, const json& config) {
    StationaryNoiseModel model;
    model.gamma = config.at("gamma").get<double>();
    model.s2 = config.at("s2").get<double>();
    model.seed = rc.seed;
    Mat plus = Mat::Constant(2, 2, 0.5);
    RetroDemoResult demo = classical_retrodiction_demo(
        model, DensityOperator::checked(plus), config.at("horizon").get<double>(),
        config.at("trajectories").get<int>(), config.at("t_minus").get<double>(), rc.jobs);

    // Gap-pooled correlator for the plot-ready table.
    std::vector<json> rows;
    std::map<long long, std::pair<double, int>> pooled;
    for (std::size_t i = 0; i < demo.table.time_tuples.size(); ++i) {
        double gap = demo.table.time_tuples[i][1] - demo.table.time_tuples[i][0];
        auto& slot = pooled[std::llround(gap * 1e9)];
        slot.first += demo.table.values[i].real();
        slot.second += 1;
    }
    for (const auto& [qgap, acc] : pooled)
        rows.push_back(json::array({static_cast<double>(qgap) * 1e-9, acc.first / acc.second}));

    ResultRecord rec;
    rec.outputs = json{{"name", "retrodiction"},
                       {"retrodicted_coherence", demo.retrodicted_coherence},
                       {"closed_form", demo.truth_closed_form},
                       {"monte_carlo", demo.truth_monte_carlo},
                       {"relative_error", demo.relative_error},
                       {"table", table({"gap", "correlator"}, std::move(rows))}};
    return {rec};
}

std::vector<ResultRecord> run_markov_cmd(const RunConfig& rc, const json& config) {
    require_enum(config, "demo", {"semigroup", "revival", "components", "frame_search"});
    const std::string demo = config.at("demo").get<std::string>();
    const int points = config.at("points").get<int>();
    const double t_max = config.at("t_max").get<double>();

    ResultRecord rec;
    if (demo == "components") {
        // Per-component divisibility verdicts on the stock correlated instance.
        FrameSearchDemo instance = rotated_zero_discord_instance();
        MarkovCheckOptions options;
        for (int k = 0; k < points; ++k)
            options.grid.push_back(t_max * k / std::max(1, points - 1));
        MarkovReport report = comp_markov_check(instance.decomp, instance.h_joint,
                                                MarkovCriterion::divisibility, options);
        std::vector<json> rows;
        for (std::size_t i = 0; i < report.components.size(); ++i)
            rows.push_back(json::array({report.components[i],
                                        instance.decomp.weights(report.components[i]),
                                        report.verdicts[i]}));
        rec.outputs = json{{"name", "components"},
                           {"criterion", report.criterion},
                           {"overall", report.overall},
                           {"offending_component", report.offending_component},
                           {"worst_choi_min_eig", report.worst_choi_min_eig},
                           {"table", table({"component", "weight", "markovian"}, std::move(rows))}};
        return {rec};
    }
    if (demo == "semigroup" || demo == "revival") {
        std::vector<SuperOperator> maps;
        for (int k = 0; k < points; ++k) {
            double t = t_max * k / std::max(1, points - 1);
            cplx factor = (demo == "semigroup")
                              ? cplx(std::exp(-config.at("gamma").get<double>() * t), 0.0)
                              : cplx(std::cos(config.at("omega").get<double>() * t), 0.0);
            maps.push_back(qubit_dephasing_map(factor));
        }
        DivisibilityResult div = cp_divisibility(maps);
        rec.outputs = json{{"name", demo},
                           {"markovian", div.markovian},
                           {"indeterminate", div.indeterminate},
                           {"worst_choi_min_eig", div.worst_choi_min_eig},
                           {"worst_pair", div.worst_pair}};
    } else {
        FrameSearchDemo instance = rotated_zero_discord_instance();
        FrameSearchConfig search;
        search.restarts = config.at("restarts").get<int>();
        search.iterations = config.at("iterations").get<int>();
        search.seed = rc.seed;
        FrameSearchResult found = frame_search(instance.decomp, instance.map_grids, search);
        rec.outputs = json{{"name", "frame_search"},
                           {"found", found.found},
                           {"iterations_used", found.iterations_used},
                           {"best_objective", found.best_objective},
                           {"consistency_residual", found.consistency_residual}};
    }
    return {rec};
}

}  // namespace

json parse_config(const std::string& subcommand, const json& raw) {
    json merged = merge_validate(defaults_for(subcommand), raw, subcommand);
    // Range checks with field-path diagnostics.
    if (subcommand == "lat") {
        if (merged.at("noise").at("variance").get<double>() < 0.0)
            throw std::invalid_argument("config: 'lat.noise.variance' must be >= 0");
        if (merged.at("noise").at("realizations").get<int>() < 1)
            throw std::invalid_argument("config: 'lat.noise.realizations' must be >= 1");
        if (merged.at("probe_time").get<double>() < 0.0)
            throw std::invalid_argument("config: 'lat.probe_time' must be >= 0");
    } else if (subcommand == "retro") {
        if (merged.at("gamma").get<double>() <= 0.0)
            throw std::invalid_argument("config: 'retro.gamma' must be > 0");
        if (merged.at("s2").get<double>() < 0.0)
            throw std::invalid_argument("config: 'retro.s2' must be >= 0");
        if (merged.at("trajectories").get<int>() < 1)
            throw std::invalid_argument("config: 'retro.trajectories' must be >= 1");
    } else if (subcommand == "dephasing") {
        for (const auto& m : merged.at("modes"))
            if (m.at("omega").get<double>() <= 0.0)
                throw std::invalid_argument("config: 'dephasing.modes[].omega' must be > 0");
        if (merged.at("bath").at("nbar").get<double>() < 0.0)
            throw std::invalid_argument("config: 'dephasing.bath.nbar' must be >= 0");
    } else if (subcommand == "bplus") {
        require_enum(merged, "frame", {"sic", "pauli", "six"});
        require_enum(merged, "state", {"random", "lat_preparation"});
        if (merged.at("count").get<int>() < 1)
            throw std::invalid_argument("config: 'bplus.count' must be >= 1");
    }
    return merged;
}

json load_config(const RunConfig& rc) {
    json raw = json::object();
    if (!rc.config_path.empty()) {
        std::ifstream in(rc.config_path);
        if (!in) throw std::invalid_argument("config: cannot open '" + rc.config_path + "'");
        try {
            in >> raw;
        } catch (const json::exception& e) {
            throw std::invalid_argument("config: parse failure: " + std::string(e.what()));
        }
    }
    if (!rc.preset.empty()) {
        if (rc.subcommand == "lat")
            raw["preset"] = rc.preset;
        else if (rc.subcommand == "markov")
            raw["demo"] = rc.preset;
        else
            throw std::invalid_argument("config: --preset is not supported for '" +
                                        rc.subcommand + "'");
    }
    return parse_config(rc.subcommand, raw);
}

std::uint64_t config_hash(const json& config) {
    std::string canonical = config.dump();  // objects serialize key-sorted
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<ResultRecord> execute(const RunConfig& rc, const json& config) {
    std::vector<ResultRecord> records;
    auto start = std::chrono::steady_clock::now();
    if (rc.subcommand == "bplus")
        records = run_bplus_cmd(rc, config);
    else if (rc.subcommand == "dephasing")
        records = run_dephasing_cmd(rc, config);
    else if (rc.subcommand == "lat")
        records = run_lat_cmd(rc, config);
    else if (rc.subcommand == "retro")
        records = run_retro_cmd(rc, config);
    else if (rc.subcommand == "markov")
        records = run_markov_cmd(rc, config);
    else
        throw std::invalid_argument("unknown subcommand '" + rc.subcommand + "'");
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::string hash = hex64(config_hash(config));
    std::string run_id =
        hex64(config_hash(json{{"sub", rc.subcommand}, {"config", hash}, {"seed", rc.seed}}));
    for (auto& rec : records) {
        rec.run_id = run_id;
        rec.subcommand = rc.subcommand;
        rec.config_hash = hash;
        rec.duration_s = elapsed;  // per-run wall clock, logged only
    }
    return records;
}

EmittedFiles emit_results(const RunConfig& rc, const json& config,
                          const std::vector<ResultRecord>& records) {
    namespace fs = std::filesystem;
    EmittedFiles files;
    fs::path out(rc.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw std::runtime_error("emit: cannot create output directory " + out.string());

    // File names embed the run id and the config hash.
    std::string base = rc.subcommand + "-";
    base += records.empty() ? "empty" : records.front().run_id;
    base += "-" + hex64(config_hash(config)).substr(0, 8);

    files.records_path = (out / (base + ".jsonl")).string();
    {
        std::ofstream jsonl(files.records_path, std::ios::binary);
        if (!jsonl) throw std::runtime_error("emit: cannot write " + files.records_path);
        for (const auto& rec : records) {
            json line{{"run_id", rec.run_id},
                      {"subcommand", rec.subcommand},
                      {"config_hash", rec.config_hash},
                      {"outputs", rec.outputs}};
            jsonl << line.dump() << "\n";
        }
    }

    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (!rec.outputs.contains("table")) continue;
        std::string name = rec.outputs.contains("name")
                               ? rec.outputs.at("name").get<std::string>()
                               : "record" + std::to_string(r);
        std::string path = (out / (base + "-" + name + ".csv")).string();
        std::ofstream csv(path, std::ios::binary);
        if (!csv) throw std::runtime_error("emit: cannot write " + path);
        const json& tab = rec.outputs.at("table");
        std::string header;
        for (const auto& c : tab.at("columns"))
            header += (header.empty() ? "" : ",") + c.get<std::string>();
        csv << header << "\n";
        for (const auto& row : tab.at("rows")) {
            std::string line;
            for (const auto& cell : row) {
                if (!line.empty()) line += ",";
                if (cell.is_string())
                    line += cell.get<std::string>();
                else if (cell.is_number_integer())
                    line += std::to_string(cell.get<long long>());
                else if (cell.is_boolean())
                    line += cell.get<bool>() ? "true" : "false";
                else
                    line += format_number(cell.get<double>());
            }
            csv << line << "\n";
        }
        files.csv_paths.push_back(path);
    }

    files.config_echo_path = (out / (base + ".config.json")).string();
    {
        std::ofstream echo(files.config_echo_path, std::ios::binary);
        if (!echo) throw std::runtime_error("emit: cannot write " + files.config_echo_path);
        echo << config.dump(2) << "\n";
    }

    files.log_path = (out / (base + ".log")).string();
    {
        std::ofstream log(files.log_path, std::ios::binary);
        for (const auto& rec : records)
            log << rec.run_id << " " << rec.subcommand << " duration_s=" << rec.duration_s
                << "\n";
    }
    return files;
}

int run_cli(const RunConfig& rc) {
    json config;
    try {
        config = load_config(rc);
    } catch (const std::invalid_argument& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::vector<ResultRecord> records;
    try {
        records = execute(rc, config);
    } catch (const unidentifiable_error& e) {
        fprintf(stderr, "error: %s\n", e.what());
        for (const auto& c : e.columns) fprintf(stderr, "  unidentifiable: %s\n", c.c_str());
        return 2;
    } catch (const numeric_error& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    try {
        EmittedFiles files = emit_results(rc, config, records);
        if (rc.verbosity > 0) {
            fprintf(stdout, "config: %s\n", config.dump(2).c_str());
        }
        fprintf(stdout, "wrote %s\n", files.records_path.c_str());
        for (const auto& p : files.csv_paths) fprintf(stdout, "wrote %s\n", p.c_str());
    } catch (const std::exception& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

}  // namespace bplus
