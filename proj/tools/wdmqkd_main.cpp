#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdmqkd/config.hpp"
#include "wdmqkd/errors.hpp"
#include "wdmqkd/figures.hpp"
#include "wdmqkd/mc.hpp"
#include "wdmqkd/version.hpp"

namespace {

using namespace wdmqkd;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_table(std::ostream& out, const Table& table, OutputFormat format) {
    if (format == OutputFormat::Structured) {
        nlohmann::json j;
        j["meta"] = nlohmann::json::object();
        for (const auto& [k, v] : table.meta) j["meta"][k] = v;
        j["columns"] = table.columns;
        j["rows"] = nlohmann::json::array();
        for (const auto& row : table.rows) j["rows"].push_back(row);
        out << j.dump(2) << "\n";
        return;
    }
    for (const auto& [k, v] : table.meta) out << "# " << k << ": " << v << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
}

void emit(const Table& table, const OutputConfig& output) {
    if (output.path.empty()) {
        write_table(std::cout, table, output.format);
        return;
    }
    std::ofstream out(output.path);
    if (!out) throw ConfigError("cannot write output file: " + output.path);
    write_table(out, table, output.format);
}

void stamp(Table& table, const RunConfig& cfg) {
    std::ostringstream hash;
    hash << std::hex << config_hash(cfg);
    table.meta.emplace_back("generator", std::string("wdmqkd ") + kVersion);
    table.meta.emplace_back("config-hash", hash.str());
}

Table rate_table(const RunConfig& cfg, const KeyRateResult& res) {
    Table t;
    t.columns = {"pair_id", "p_acc", "qber", "key_rate"};
    for (const PairRate& p : res.per_pair)
        t.rows.push_back({double(p.id), p.p_acc, p.qber, p.key_rate});
    t.meta.emplace_back("k_total", format_double(res.k_total));
    t.meta.emplace_back("mu", format_double(res.mu_used));
    if (std::isfinite(res.gain)) t.meta.emplace_back("gain", format_double(res.gain));
    stamp(t, cfg);
    return t;
}

int cmd_rate(const RunConfig& cfg, int jobs, bool with_optimize) {
    (void)jobs;
    RunConfig run = cfg;
    KeyRateResult res;
    if (with_optimize || cfg.optimize_mu) {
        const MuOptResult opt =
            optimize_wdm_mu(run.channels, run.source, run.link, run.mu_lo, run.mu_hi);
        run.source.mu = opt.mu_star;
        res = total_wdm_rate(run.channels, run.source, run.link);
        res.gain = gain(res.k_total, thermal_baseline_rate(run.link, run.mu_lo, run.mu_hi));
        if (opt.bracket_failure)
            std::cerr << "warning: optimal mu sits at a search bound (mu = " << opt.mu_star
                      << ")\n";
    } else {
        res = total_wdm_rate(run.channels, run.source, run.link);
    }
    emit(rate_table(cfg, res), cfg.output);
    return 0;
}

int cmd_sweep(const RunConfig& cfg, int jobs) {
    if (!cfg.sweep) throw ConfigError("sweep subcommand requires a [sweep] section");
    SweepSpec spec;
    spec.axis = cfg.sweep->axis;
    spec.grid = cfg.sweep->make_grid();
    spec.plan = cfg.channels;
    spec.src = cfg.source;
    spec.link = cfg.link;
    spec.optimize_mu = cfg.sweep->optimize_mu;
    spec.mu_lo = cfg.sweep->mu_lo;
    spec.mu_hi = cfg.sweep->mu_hi;
    spec.tau_rec = cfg.sweep->tau_rec;
    const auto rows = run_sweep(spec, jobs);

    const bool per_pair = spec.axis != SweepAxis::NPairs;
    Table t;
    t.columns = {"axis_value", "k_total", "gain", "mu", "mu_at_bound"};
    if (spec.tau_rec > 0.0) t.columns.push_back("r_per_second");
    std::vector<int> ids;
    if (per_pair)
        for (const ChannelPair& p : build_grid(cfg.channels)) {
            ids.push_back(p.id);
            t.columns.push_back("k_pair_" + std::to_string(p.id));
        }
    bool failures = false;
    for (const SweepRow& row : rows) {
        if (!row.ok) {
            failures = true;
            std::cerr << "row " << format_double(row.axis_value) << ": " << row.error << "\n";
        }
        std::vector<double> r{row.axis_value, row.result.k_total, row.result.gain,
                              row.result.mu_used, row.mu_at_bound ? 1.0 : 0.0};
        if (spec.tau_rec > 0.0) r.push_back(row.result.r_per_second);
        if (per_pair) {
            for (int id : ids) {
                double k = std::nan("");
                for (const PairRate& p : row.result.per_pair)
                    if (p.id == id) k = p.key_rate;
                r.push_back(k);
            }
        }
        t.rows.push_back(std::move(r));
    }
    stamp(t, cfg);
    emit(t, cfg.output);
    return failures ? 2 : 0;
}

int cmd_validate(const RunConfig& cfg, int jobs) {
    const McEstimate mc = simulate(cfg.channels, cfg.source, cfg.link, cfg.mc.trials, cfg.mc.seed,
                                   jobs);
    const KeyRateResult analytic = total_wdm_rate(cfg.channels, cfg.source, cfg.link);

    const auto grid = build_grid(cfg.channels);
    PairDistribution dist =
        auto_pair_distribution(cfg.source, engine_tail_target(cfg.source, cfg.link));

    Table t;
    t.columns = {"pair_id", "pattern_idx", "analytic", "empirical", "std_err", "deviation_sigma"};
    double max_dev = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const BucketProbs b = bucket_probs(grid[c], cfg.channels, cfg.source);
        const ClickTable table = click_table(b, dist, dist, cfg.link);
        const double analytic_p[4] = {table.p_hh, table.p_hv, table.p_vh, table.p_vv};
        const double emp[4] = {mc.per_pair[c].f_hh, mc.per_pair[c].f_hv, mc.per_pair[c].f_vh,
                               mc.per_pair[c].f_vv};
        for (int k = 0; k < 4; ++k) {
            const double se = std::sqrt(analytic_p[k] * (1.0 - analytic_p[k]) /
                                        double(cfg.mc.trials));
            double dev = 0.0;
            if (se > 0.0)
                dev = std::abs(emp[k] - analytic_p[k]) / se;
            else if (emp[k] != analytic_p[k])
                dev = std::numeric_limits<double>::infinity();
            max_dev = std::max(max_dev, dev);
            t.rows.push_back({double(grid[c].id), double(k), analytic_p[k], emp[k], se, dev});
        }
    }
    t.meta.emplace_back("trials", std::to_string(cfg.mc.trials));
    t.meta.emplace_back("seed", std::to_string(cfg.mc.seed));
    t.meta.emplace_back("max_deviation_sigma", format_double(max_dev));
    t.meta.emplace_back("k_total_analytic", format_double(analytic.k_total));
    stamp(t, cfg);
    emit(t, cfg.output);
    std::cerr << "max deviation: " << format_double(max_dev) << " sigma over "
              << t.rows.size() << " patterns\n";
    return max_dev > 5.0 ? 3 : 0;
}

int cmd_figure(const RunConfig& cfg, const std::string& id, int jobs) {
    if (id == "list") {
        for (const FigureInfo& f : figure_registry())
            std::cout << f.id << "\t" << f.description << "\n";
        return 0;
    }
    Table t = run_figure(id, jobs);
    stamp(t, cfg);
    emit(t, cfg.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Key-rate calculator for wavelength-multiplexed entanglement-based QKD"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string config_path;
    std::string output_path;
    std::string format;
    int jobs = 0;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    bool have_seed = false, have_trials = false;
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--jobs", jobs, "worker count (default: WDMQKD_JOBS or hardware)");
    app.add_option("--output", output_path, "output file (default: stdout)");
    app.add_option("--format", format, "table | structured")
        ->check(CLI::IsMember({"table", "structured"}));
    app.add_option("--seed", seed, "Monte-Carlo seed override");
    app.add_option("--trials", trials, "Monte-Carlo trial count override");

    auto* rate = app.add_subcommand("rate", "key rate for the configured system");
    auto* show_config = app.add_subcommand("config", "print the effective configuration");
    auto* optimize = app.add_subcommand("optimize", "mu-optimized key rate and gain");
    auto* sweep = app.add_subcommand("sweep", "run the configured parameter sweep");
    auto* validate = app.add_subcommand("validate", "Monte-Carlo cross-check of the analytics");
    auto* figure = app.add_subcommand("figure", "canned parameter studies; 'figure list'");
    std::string figure_id;
    figure->add_option("id", figure_id, "figure id (see 'figure list')")->required();

    CLI11_PARSE(app, argc, argv);
    have_seed = app.count("--seed") > 0;
    have_trials = app.count("--trials") > 0;

    try {
        RunConfig cfg = config_path.empty() ? default_config() : load_config_file(config_path);
        if (!output_path.empty()) cfg.output.path = output_path;
        if (!format.empty())
            cfg.output.format = format == "structured" ? OutputFormat::Structured
                                                       : OutputFormat::Table;
        if (have_seed) cfg.mc.seed = seed;
        if (have_trials) cfg.mc.trials = trials;

        if (show_config->parsed()) {
            std::cout << render_config(cfg);
            return 0;
        }
        if (rate->parsed()) return cmd_rate(cfg, jobs, false);
        if (optimize->parsed()) return cmd_rate(cfg, jobs, true);
        if (sweep->parsed()) return cmd_sweep(cfg, jobs);
        if (validate->parsed()) return cmd_validate(cfg, jobs);
        if (figure->parsed()) return cmd_figure(cfg, figure_id, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
