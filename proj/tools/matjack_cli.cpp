// Command-line driver: test-matrix generation, one-shot approximations with
// jackknife estimates, Monte Carlo sweeps, and diagnostics.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "matjack/matjack.hpp"

namespace {

using namespace matjack;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
    if (!out) throw FormatError("cannot open output file " + path);
    return out;
}

void print_summary_header(const std::string& algorithm, const MatrixSource& a, int s) {
    std::cout << algorithm << ": " << a.rows() << " x " << a.cols() << " matrix, s = " << s
              << "\n";
}

void print_spectrum(const VectorXd& values, const char* name) {
    const Eigen::Index n = std::min<Eigen::Index>(values.size(), 10);
    std::cout << name << " (leading " << n << "):";
    for (Eigen::Index i = 0; i < n; ++i) std::cout << ' ' << detail::format_double(values[i]);
    std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jackknife variance estimation for randomized low-rank approximation"};
    app.require_subcommand(1);

    // --- generate ---------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "Generate a test matrix and save it");
    std::string gen_type = "exp-decay", gen_out, gen_csv, gen_drop;
    std::int64_t gen_d = 1000, gen_rank = 5;
    double gen_xi = 1e-4, gen_rate = 0.1, gen_p = 1.0, gen_sigma = 10.0;
    std::uint64_t gen_seed = 0;
    char gen_delim = ',';
    gen->add_option("--type", gen_type, "noisy-lr | exp-decay | poly-decay | rbf")
        ->check(CLI::IsMember({"noisy-lr", "exp-decay", "poly-decay", "rbf"}));
    gen->add_option("--d", gen_d, "dimension");
    gen->add_option("--rank,--R", gen_rank, "number of leading unit singular values");
    gen->add_option("--xi", gen_xi, "NoisyLR noise level");
    gen->add_option("--rate", gen_rate, "ExpDecay rate");
    gen->add_option("--p", gen_p, "PolyDecay exponent");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--csv", gen_csv, "CSV dataset for the RBF kernel");
    gen->add_option("--sigma", gen_sigma, "RBF bandwidth");
    gen->add_option("--delimiter", gen_delim, "CSV delimiter (default ',')");
    gen->add_option("--drop-cols", gen_drop, "comma-separated label columns to drop");
    gen->add_option("--out", gen_out, "output matrix file")->required();

    // --- shared approximation flags ---------------------------------------
    std::string matrix_path, out_path;
    std::int64_t s_value = 20;
    int q_value = 2;
    std::uint64_t seed = 0;
    bool baseline = false;
    double shift_multiplier = 1.0;

    auto add_common = [&](CLI::App* cmd, int default_q) {
        cmd->add_option("--matrix", matrix_path, "matrix file")->required();
        cmd->add_option("--s", s_value, "sketch size");
        q_value = default_q;
        cmd->add_option("--q", q_value, "subspace iteration steps");
        cmd->add_option("--seed", seed, "base seed");
        cmd->add_flag("--baseline", baseline, "use the O(s^4) baseline replicate path");
        cmd->add_option("--shift-multiplier", shift_multiplier, "Nystrom stability shift scale");
    };

    auto* rsvd_cmd = app.add_subcommand("rsvd", "One-shot randomized SVD with Jack");
    add_common(rsvd_cmd, 2);
    int schatten_p = 0;
    rsvd_cmd->add_option("--schatten-p", schatten_p, "also report Jack_p (even, <= 16)");

    auto* nys_cmd = app.add_subcommand("nystrom", "One-shot Nystrom approximation with Jack");
    add_common(nys_cmd, 0);
    nys_cmd->add_option("--schatten-p", schatten_p, "also report Jack_p (even, <= 16)");

    // --- sweep -------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over sketch sizes");
    ExperimentConfig cfg;
    std::vector<int> s_list;
    int truncate_rank = 0, sweep_schatten = 0;
    sweep_cmd->add_option("--matrix", matrix_path, "matrix file")->required();
    sweep_cmd->add_option("--matrix-id", cfg.matrix_id, "label for the CSV rows");
    sweep_cmd->add_option("--algorithm", cfg.algorithm, "rsvd | nystrom")
        ->check(CLI::IsMember({"rsvd", "nystrom"}));
    sweep_cmd->add_option("--s", s_list, "sketch sizes (default 20 40 ... 140)");
    sweep_cmd->add_option("--q", cfg.q, "subspace iteration steps");
    sweep_cmd->add_option("--trials", cfg.trials, "Monte Carlo trials per row");
    sweep_cmd->add_option("--seed", cfg.base_seed, "base seed");
    sweep_cmd->add_option("--truncate-rank", truncate_rank, "jackknife the rank-r truncation");
    sweep_cmd->add_option("--schatten-p", sweep_schatten, "jackknife in Schatten-p norm");
    sweep_cmd->add_option("--shift-multiplier", cfg.shift_multiplier, "Nystrom shift scale");
    sweep_cmd->add_flag("--baseline", baseline, "use baseline replicate path");
    sweep_cmd->add_option("--out", out_path, "output CSV")->required();

    // --- projector-sweep ----------------------------------------------------
    auto* proj_cmd = app.add_subcommand("projector-sweep",
                                        "Sweep the jackknife of a singular projector");
    int projector_index = 1;
    std::string side = "left";
    proj_cmd->add_option("--matrix", matrix_path, "matrix file")->required();
    proj_cmd->add_option("--matrix-id", cfg.matrix_id, "label for the CSV rows");
    proj_cmd->add_option("--algorithm", cfg.algorithm, "rsvd | nystrom")
        ->check(CLI::IsMember({"rsvd", "nystrom"}));
    proj_cmd->add_option("--s", s_list, "sketch sizes");
    proj_cmd->add_option("--q", cfg.q, "subspace iteration steps");
    proj_cmd->add_option("--trials", cfg.trials, "Monte Carlo trials per row");
    proj_cmd->add_option("--seed", cfg.base_seed, "base seed");
    proj_cmd->add_option("--projector-index", projector_index, "1-based singular index");
    proj_cmd->add_option("--side", side, "left | right")
        ->check(CLI::IsMember({"left", "right"}));
    proj_cmd->add_option("--shift-multiplier", cfg.shift_multiplier, "Nystrom shift scale");
    proj_cmd->add_flag("--baseline", baseline, "use baseline replicate path");
    proj_cmd->add_option("--out", out_path, "output CSV")->required();

    // --- ortho-check ---------------------------------------------------------
    auto* ortho_cmd = app.add_subcommand("ortho-check",
                                         "Random orthoprojector bias/variance validation");
    std::int64_t ortho_d = 20, ortho_s = 5;
    int ortho_m = 5000;
    ortho_cmd->add_option("--d", ortho_d, "dimension");
    ortho_cmd->add_option("--s", ortho_s, "projector rank");
    ortho_cmd->add_option("--trials", ortho_m, "Monte Carlo samples");
    ortho_cmd->add_option("--seed", seed, "base seed");

    // --- entry-map ------------------------------------------------------------
    auto* entry_cmd = app.add_subcommand(
        "entry-map", "Entrywise Tukey estimates for a singular vector (CSV)");
    int vector_index = 1;
    int entry_q = 0;  // error large enough to visualize
    entry_cmd->add_option("--matrix", matrix_path, "matrix file")->required();
    entry_cmd->add_option("--s", s_value, "sketch size");
    entry_cmd->add_option("--q", entry_q, "subspace iteration steps");
    entry_cmd->add_option("--seed", seed, "seed");
    entry_cmd->add_option("--vector-index", vector_index, "1-based left singular vector");
    entry_cmd->add_flag("--baseline", baseline, "use baseline replicate path");
    entry_cmd->add_option("--out", out_path, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            MatrixSource m = [&] {
                if (gen_type == "noisy-lr") return noisy_lr(gen_d, gen_rank, gen_xi, gen_seed);
                if (gen_type == "exp-decay") return exp_decay(gen_d, gen_rank, gen_rate);
                if (gen_type == "poly-decay") return poly_decay(gen_d, gen_rank, gen_p);
                std::vector<std::string> drops;
                std::stringstream ss(gen_drop);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) drops.push_back(item);
                return rbf_kernel(load_csv_table(gen_csv, gen_delim, drops), gen_sigma);
            }();
            save_matrix(m, gen_out);
            std::cout << "wrote " << m.rows() << " x " << m.cols() << " matrix to " << gen_out
                      << "\n";
        } else if (rsvd_cmd->parsed()) {
            const MatrixSource a = load_matrix(matrix_path);
            const RsvdResult res = rsvd(a, s_value, q_value, seed);
            const CoreReplicates cores =
                baseline ? rsvd_cores_baseline(res) : rsvd_cores_fast(res);
            print_summary_header("rsvd", a, static_cast<int>(s_value));
            print_spectrum(res.sigma, "sigma");
            std::cout << "jack = " << detail::format_double(jack_frobenius(cores).value)
                      << "\n";
            if (schatten_p > 0) {
                if (schatten_p > 16)
                    throw ParameterError("--schatten-p capped at 16 to avoid overflow");
                std::cout << "jack_" << schatten_p << " = "
                          << detail::format_double(jack_schatten(cores, schatten_p).value)
                          << "\n";
            }
            if (res.degenerate)
                std::cout << "warning: sketch numerically rank-deficient\n";
        } else if (nys_cmd->parsed()) {
            const MatrixSource a = load_matrix(matrix_path);
            const NystromResult res = nystrom(a, s_value, seed, shift_multiplier);
            const CoreReplicates cores =
                baseline ? nystrom_cores_baseline(res) : nystrom_cores_fast(res);
            print_summary_header("nystrom", a, static_cast<int>(s_value));
            print_spectrum(res.lambda, "lambda");
            std::cout << "nu = " << detail::format_double(res.nu) << "\n";
            std::cout << "jack = " << detail::format_double(jack_frobenius(cores).value)
                      << "\n";
            if (schatten_p > 0) {
                if (schatten_p > 16)
                    throw ParameterError("--schatten-p capped at 16 to avoid overflow");
                std::cout << "jack_" << schatten_p << " = "
                          << detail::format_double(jack_schatten(cores, schatten_p).value)
                          << "\n";
            }
        } else if (sweep_cmd->parsed() || proj_cmd->parsed()) {
            const MatrixSource a = load_matrix(matrix_path);
            if (!s_list.empty()) cfg.s_values = s_list;
            cfg.use_fast_cores = !baseline;
            if (proj_cmd->parsed()) {
                cfg.target.kind = DerivedTarget::Kind::Projector;
                cfg.target.index = projector_index;
                cfg.target.side = side == "left" ? ProjectorSide::Left : ProjectorSide::Right;
            } else if (truncate_rank > 0) {
                cfg.target.kind = DerivedTarget::Kind::Truncation;
                cfg.target.index = truncate_rank;
            } else if (sweep_schatten > 0) {
                if (sweep_schatten > 16)
                    throw ParameterError("--schatten-p capped at 16 to avoid overflow");
                cfg.target.kind = DerivedTarget::Kind::Schatten;
                cfg.target.index = sweep_schatten;
            }
            std::ofstream out = open_output(out_path);
            sweep_experiment(cfg, a, out);
            std::cout << "wrote " << cfg.s_values.size() << " rows to " << out_path << "\n";
        } else if (ortho_cmd->parsed()) {
            const OrthoprojectorCheck c = orthoprojector_check(ortho_d, ortho_s, ortho_m, seed);
            std::cout << "bias_sq_mc      = " << detail::format_double(c.bias_sq_mc) << "\n"
                      << "bias_sq_formula = " << detail::format_double(c.bias_sq_formula)
                      << "\n"
                      << "var_mc          = " << detail::format_double(c.var_mc) << "\n"
                      << "var_formula     = " << detail::format_double(c.var_formula) << "\n"
                      << "bias_sq_printed = " << detail::format_double(c.bias_sq_printed)
                      << "\n"
                      << "var_printed     = " << detail::format_double(c.var_printed) << "\n";
        } else if (entry_cmd->parsed()) {
            const MatrixSource a = load_matrix(matrix_path);
            const RsvdResult res = rsvd(a, s_value, entry_q, seed);
            const CoreReplicates cores =
                baseline ? rsvd_cores_baseline(res) : rsvd_cores_fast(res);
            std::ofstream out = open_output(out_path);
            out << "row,value,estimate\n";
            for (const EntryMapRow& r : entry_map(res, cores, vector_index))
                out << r.row << ',' << detail::format_double(r.value) << ','
                    << detail::format_double(r.estimate) << '\n';
            std::cout << "wrote entry map to " << out_path << "\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
