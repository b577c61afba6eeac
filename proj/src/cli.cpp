#include "fmm/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "fmm/builtins.hpp"
#include "fmm/engine.hpp"
#include "fmm/errors.hpp"
#include "fmm/reduce.hpp"
#include "fmm/scheme_io.hpp"
#include "fmm/verify.hpp"

namespace fmm {

namespace {

struct Input {
    std::optional<BilinearScheme> scheme;
    std::optional<Slp> slp;

    bool is_scheme() const { return scheme.has_value(); }
};

std::optional<Dims> parse_dims_flag(const std::string& flag) {
    if (flag.empty()) return std::nullopt;
    Dims d;
    char c1 = 0, c2 = 0;
    std::istringstream ss(flag);
    if (!(ss >> d.n >> c1 >> d.m >> c2 >> d.p) || c1 != ',' || c2 != ',')
        throw ArgError("--dims expects n,m,p");
    return d;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Builtin name, or a file: program grammar if it assigns with '=',
// coefficient blocks otherwise.
Input resolve_input(const std::string& name, std::optional<Dims> dims) {
    Input input;
    if (is_builtin(name)) {
        for (const auto& e : builtin_catalog()) {
            if (e.name != name) continue;
            if (e.kind == BuiltinKind::Scheme)
                input.scheme = builtin_scheme(name);
            else
                input.slp = builtin_slp(name);
            return input;
        }
    }
    const std::string text = read_file(name);
    if (text.find('=') != std::string::npos)
        input.slp = parse_slp(text, dims);
    else
        input.scheme = parse_scheme(text, dims, name);
    return input;
}

std::string count_line(const Input& input) {
    std::ostringstream os;
    if (input.is_scheme()) {
        const OpCountReport r = naive_addition_count(*input.scheme);
        os << "additions: " << r.adds_total() << " (A:" << r.adds_a << " B:" << r.adds_b
           << " C:" << r.adds_c << "), multiplications: " << r.muls;
        if (r.scales > 0) os << ", scalar multiplications: " << r.scales;
    } else {
        const OpCountReport r = slp_addition_count(*input.slp);
        os << "additions: " << r.adds_total() << ", multiplications: " << r.muls;
        if (r.scales > 0) os << ", scalar multiplications: " << r.scales;
    }
    return os.str();
}

int do_verify(const Input& input, std::uint64_t mod, int trials, std::uint64_t seed,
              std::ostream& out) {
    if (mod != 0) {
        const RandomCheckResult r = input.is_scheme()
                                        ? random_check(*input.scheme, mod, trials, seed)
                                        : random_check(*input.slp, mod, trials, seed);
        if (r.pass) {
            out << "Pass (" << trials << " trials, mod " << mod << ")\n";
            return 0;
        }
        out << "Fail at trial " << r.trial << ": C[" << r.row << "][" << r.col << "] = " << r.got
            << ", naive product has " << r.want << "\n";
        out << "witness A =";
        for (auto x : r.a) out << ' ' << x;
        out << "\nwitness B =";
        for (auto x : r.b) out << ' ' << x;
        out << "\n";
        return 1;
    }
    const VerificationReport rep =
        input.is_scheme() ? verify_scheme(*input.scheme) : verify_slp(*input.slp);
    if (rep.valid()) {
        out << "Valid (" << rep.equations_checked << "/" << rep.equations_checked
            << " equations)\n";
        return 0;
    }
    out << "Invalid (" << rep.failures.size() << "/" << rep.equations_checked
        << " equations failed)\n";
    for (const BrentFailure& f : rep.failures)
        out << "  (a=" << f.a << ", b=" << f.b << ", c=" << f.c << "): computed " << f.computed
            << ", expected " << f.expected << "\n";
    return 1;
}

BilinearScheme as_scheme(const Input& input) {
    return input.is_scheme() ? *input.scheme : extract_scheme(*input.slp);
}

template <typename Ring, typename Gen>
int multiply_exact(const Slp& slp, int size, int threshold, std::uint64_t seed, Gen gen,
                   OpMeter& fast_meter, OpMeter& base_meter, std::ostream& out) {
    using Value = typename Ring::Value;
    std::mt19937_64 rng(seed);
    Matrix<Value> a(size, size), b(size, size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            a(r, c) = gen(rng);
            b(r, c) = gen(rng);
        }
    Ring fast_ring(&fast_meter), base_ring(&base_meter);
    const auto fast = recursive_multiply(a, b, slp, threshold, fast_ring);
    const auto naive = naive_multiply(a, b, base_ring);
    const bool ok = fast == naive;
    out << (ok ? "agreement: exact match with the naive product\n"
               : "MISMATCH against the naive product\n");
    return ok ? 0 : 1;
}

int do_multiply(const Slp& slp, int size, int threshold, const std::string& ring_spec,
                std::uint64_t seed, std::ostream& out) {
    int padded = 1;
    while (padded < size) padded *= slp.dims.n;
    out << "size " << size << " (padded " << padded << "), ring " << ring_spec << ", threshold "
        << threshold << "\n";
    OpMeter fast_meter, base_meter;
    int rc;
    if (ring_spec == "int64") {
        rc = multiply_exact<Int64Ring>(
            slp, size, threshold, seed,
            [](std::mt19937_64& rng) { return std::int64_t(rng() % 201) - 100; }, fast_meter,
            base_meter, out);
    } else if (ring_spec == "rational") {
        rc = multiply_exact<RationalRing>(
            slp, size, threshold, seed,
            [](std::mt19937_64& rng) {
                return Rational(long(rng() % 201) - 100, long(1 + rng() % 4));
            },
            fast_meter, base_meter, out);
    } else if (ring_spec.rfind("modp:", 0) == 0) {
        const std::uint64_t p = std::stoull(ring_spec.substr(5));
        std::mt19937_64 rng(seed);
        Matrix<std::uint64_t> a(size, size), b(size, size);
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c) {
                a(r, c) = rng() % p;
                b(r, c) = rng() % p;
            }
        PrimeFieldRing fast_ring(p, &fast_meter), base_ring(p, &base_meter);
        const auto fast = recursive_multiply(a, b, slp, threshold, fast_ring);
        const auto naive = naive_multiply(a, b, base_ring);
        const bool ok = fast == naive;
        out << (ok ? "agreement: exact match with the naive product\n"
                   : "MISMATCH against the naive product\n");
        rc = ok ? 0 : 1;
    } else if (ring_spec == "f64") {
        std::mt19937_64 rng(seed);
        Matrix<double> a(size, size), b(size, size);
        auto uniform = [&rng]() { return double(rng()) / double(std::mt19937_64::max()) * 2 - 1; };
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c) {
                a(r, c) = uniform();
                b(r, c) = uniform();
            }
        DoubleRing fast_ring(&fast_meter), base_ring(&base_meter);
        const auto fast = recursive_multiply(a, b, slp, threshold, fast_ring);
        const auto naive = naive_multiply(a, b, base_ring);
        double max_dev = 0;
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c)
                max_dev = std::max(max_dev, std::fabs(fast(r, c) - naive(r, c)));
        const double bound = 1e3 * std::numeric_limits<double>::epsilon() * size;
        const bool ok = max_dev <= bound;
        out << "max deviation from the naive product: " << std::scientific
            << std::setprecision(3) << max_dev << " (bound " << bound << ")\n"
            << std::defaultfloat;
        rc = ok ? 0 : 1;
    } else {
        throw ArgError("unknown ring '" + ring_spec + "' (rational|int64|f64|modp:P)");
    }
    out << "meter: adds=" << fast_meter.adds << " muls=" << fast_meter.muls
        << " scales=" << fast_meter.scales << "\n";
    out << "naive baseline: adds=" << base_meter.adds << " muls=" << base_meter.muls << "\n";
    return rc;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"bilinear matrix-multiplication scheme toolkit"};
    app.require_subcommand(1);

    // verify
    std::string v_input, v_dims;
    std::uint64_t v_mod = 0, v_seed = 0;
    int v_trials = 100;
    auto* verify_cmd = app.add_subcommand("verify", "check a scheme or program exactly");
    verify_cmd->add_option("input", v_input, "file or builtin")->required();
    verify_cmd->add_option("--dims", v_dims, "dims n,m,p when not inferable");
    verify_cmd->add_option("--mod", v_mod, "randomized check over F_p instead");
    verify_cmd->add_option("--trials", v_trials, "randomized trials");
    verify_cmd->add_option("--seed", v_seed, "randomized check seed");

    // count
    std::string c_input, c_dims;
    auto* count_cmd = app.add_subcommand("count", "report addition/multiplication counts");
    count_cmd->add_option("input", c_input, "file or builtin")->required();
    count_cmd->add_option("--dims", c_dims, "dims n,m,p when not inferable");

    // reduce
    std::string r_input, r_dims, r_emit;
    std::uint64_t r_seed = 0;
    int r_restarts = 1;
    bool r_seeded = false;
    auto* reduce_cmd = app.add_subcommand("reduce", "greedily reduce the addition count");
    reduce_cmd->add_option("input", r_input, "file or builtin")->required();
    reduce_cmd->add_option("--dims", r_dims, "dims n,m,p when not inferable");
    auto* seed_opt = reduce_cmd->add_option("--seed", r_seed, "seeded tie-breaking");
    auto* restarts_opt = reduce_cmd->add_option("--restarts", r_restarts, "restart count");
    reduce_cmd->add_option("--emit-slp", r_emit, "write the schedule to this path");

    // emit
    std::string e_input, e_dims, e_format = "slp", e_output;
    auto* emit_cmd = app.add_subcommand("emit", "convert between formats");
    emit_cmd->add_option("input", e_input, "file or builtin")->required();
    emit_cmd->add_option("--dims", e_dims, "dims n,m,p when not inferable");
    emit_cmd->add_option("--format", e_format, "slp | scheme-file")
        ->check(CLI::IsMember({"slp", "scheme-file"}));
    emit_cmd->add_option("--output", e_output, "write here instead of stdout");

    // multiply
    int m_size = 0, m_threshold = 27;
    std::string m_ring = "int64", m_slp = "stapleton59-slp", m_dims;
    std::uint64_t m_seed = 0;
    auto* mul_cmd = app.add_subcommand("multiply", "recursive multiply against the naive oracle");
    mul_cmd->add_option("--size", m_size, "matrix size")->required();
    mul_cmd->add_option("--threshold", m_threshold, "naive below this size");
    mul_cmd->add_option("--ring", m_ring, "rational|int64|f64|modp:P");
    mul_cmd->add_option("--seed", m_seed, "input seed");
    mul_cmd->add_option("--slp", m_slp, "schedule to run (file or builtin)");
    mul_cmd->add_option("--dims", m_dims, "dims of a schedule file");

    // bench
    std::vector<int> b_sizes;
    int b_threshold = 27, b_reps = 3;
    std::string b_slp = "stapleton59-slp", b_dims;
    std::uint64_t b_seed = 0;
    auto* bench_cmd = app.add_subcommand("bench", "timing and exact operation counts");
    bench_cmd->add_option("--sizes", b_sizes, "comma-separated sizes")
        ->required()
        ->delimiter(',');
    bench_cmd->add_option("--threshold", b_threshold, "naive below this size");
    bench_cmd->add_option("--reps", b_reps, "repetitions per size");
    bench_cmd->add_option("--seed", b_seed, "input seed");
    bench_cmd->add_option("--slp", b_slp, "schedule to run (file or builtin)");
    bench_cmd->add_option("--dims", b_dims, "dims of a schedule file");

    // builtins
    auto* builtins_cmd = app.add_subcommand("builtins", "list bundled schemes and schedules");

    std::vector<const char*> argv;
    argv.push_back("fmm");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (verify_cmd->parsed())
            return do_verify(resolve_input(v_input, parse_dims_flag(v_dims)), v_mod, v_trials,
                             v_seed, out);
        if (count_cmd->parsed()) {
            out << count_line(resolve_input(c_input, parse_dims_flag(c_dims))) << "\n";
            return 0;
        }
        if (reduce_cmd->parsed()) {
            r_seeded = seed_opt->count() > 0 || restarts_opt->count() > 0;
            ReductionConfig config;
            config.tie_break = r_seeded ? TieBreak::SeededRandom : TieBreak::Deterministic;
            config.seed = r_seed;
            config.restarts = r_seeded ? r_restarts : 1;
            const BilinearScheme scheme = as_scheme(resolve_input(r_input, parse_dims_flag(r_dims)));
            auto [slp, rep] = reduce_scheme(scheme, config);
            out << "input additions: " << rep.input_naive_additions << "\n";
            out << "output additions: " << rep.output_additions << "\n";
            out << "temporaries: A " << rep.temps_a << ", B " << rep.temps_b << ", M "
                << rep.temps_m << "\n";
            out << "iterations: " << rep.iterations << "\n";
            if (r_seeded)
                out << "seed: " << rep.seed_used << " (best of " << rep.restarts_run
                    << " restarts)\n";
            if (!r_emit.empty()) {
                std::ofstream f(r_emit, std::ios::binary);
                if (!f) throw ArgError("cannot write '" + r_emit + "'");
                f << emit_slp(slp);
            }
            return 0;
        }
        if (emit_cmd->parsed()) {
            const Input input = resolve_input(e_input, parse_dims_flag(e_dims));
            std::string text;
            if (e_format == "slp") {
                const Slp slp = input.is_scheme() ? scheme_to_naive_slp(*input.scheme) : *input.slp;
                text = emit_slp(slp);
            } else {
                text = serialize_scheme(as_scheme(input)) + "\n";
            }
            if (e_output.empty()) {
                out << text;
            } else {
                std::ofstream f(e_output, std::ios::binary);
                if (!f) throw ArgError("cannot write '" + e_output + "'");
                f << text;
            }
            return 0;
        }
        if (mul_cmd->parsed()) {
            const Input input = resolve_input(m_slp, parse_dims_flag(m_dims));
            const Slp slp = input.is_scheme() ? scheme_to_naive_slp(*input.scheme) : *input.slp;
            if (m_size < 1) throw ArgError("--size must be positive");
            return do_multiply(slp, m_size, m_threshold, m_ring, m_seed, out);
        }
        if (bench_cmd->parsed()) {
            const Input input = resolve_input(b_slp, parse_dims_flag(b_dims));
            const Slp slp = input.is_scheme() ? scheme_to_naive_slp(*input.scheme) : *input.slp;
            out << format_bench_rows(bench(slp, b_sizes, b_threshold, b_reps, b_seed));
            return 0;
        }
        if (builtins_cmd->parsed()) {
            for (const auto& e : builtin_catalog()) {
                std::string dims, rank, adds;
                if (e.kind == BuiltinKind::Scheme) {
                    const BilinearScheme s = builtin_scheme(e.name);
                    dims = s.dims().to_string();
                    rank = std::to_string(s.rank());
                    adds = std::to_string(naive_addition_count(s).adds_total());
                } else {
                    const Slp s = builtin_slp(e.name);
                    dims = s.dims.to_string();
                    rank = std::to_string(s.mul_count());
                    adds = std::to_string(slp_addition_count(s).adds_total());
                }
                out << e.name << "\t" << (e.kind == BuiltinKind::Scheme ? "scheme" : "program")
                    << "\t" << dims << "\trank " << rank << "\tadditions " << adds << "\t"
                    << e.description << "\n";
            }
            return 0;
        }
        err << "no subcommand\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace fmm
