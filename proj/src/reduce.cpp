#include "fmm/reduce.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <tuple>

#include "fmm/errors.hpp"
#include "fmm/verify.hpp"

namespace fmm {

namespace {

// Largest g with (a/g, b/g) integral and coprime; sign of a.
Rational pair_normalizer(const Rational& a, const Rational& b) {
    const mpz_class num = gcd(mpz_class(a.num() * b.den()), mpz_class(b.num() * a.den()));
    Rational g(num, mpz_class(a.den() * b.den()));
    return a.sign() < 0 ? -g : g;
}

struct Pattern {
    int x, y;
    Rational cx, cy;

    bool operator<(const Pattern& o) const {
        return std::tie(x, y, cx, cy) < std::tie(o.x, o.y, o.cx, o.cy);
    }
    bool operator==(const Pattern& o) const {
        return x == o.x && y == o.y && cx == o.cx && cy == o.cy;
    }
};

Pattern normalized_pattern(int x, const Rational& cx, int y, const Rational& cy) {
    const Rational g = pair_normalizer(cx, cy);
    return Pattern{x, y, cx / g, cy / g};
}

void check_form_set(const LinearFormSet& fs) {
    for (const LinearForm& f : fs.forms) {
        int prev = -1;
        for (const auto& [idx, coef] : f) {
            if (idx <= prev) throw ArgError("form indices must be strictly increasing");
            if (idx < 0 || idx >= fs.variables) throw ArgError("form index out of range");
            if (coef.is_zero()) throw ArgError("form stores a zero coefficient");
            prev = idx;
        }
    }
}

}  // namespace

GreedyResult greedy_cse(const LinearFormSet& input, const ReductionConfig& config) {
    if (config.restarts < 1) throw ArgError("restarts must be >= 1");
    if (config.tie_break == TieBreak::Deterministic && config.restarts != 1)
        throw ArgError("deterministic tie-breaking implies a single restart");
    check_form_set(input);

    GreedyResult res;
    res.rewritten = input;
    std::mt19937_64 rng(config.seed);
    auto& forms = res.rewritten.forms;

    for (;;) {
        std::map<Pattern, int> counts;
        for (const LinearForm& f : forms)
            for (size_t i = 0; i < f.size(); ++i)
                for (size_t j = i + 1; j < f.size(); ++j)
                    ++counts[normalized_pattern(f[i].first, f[i].second, f[j].first, f[j].second)];

        int best = 1;
        for (const auto& [pat, n] : counts) best = std::max(best, n);
        if (best < 2) break;

        const Pattern* chosen = nullptr;
        if (config.tie_break == TieBreak::Deterministic) {
            for (const auto& [pat, n] : counts)
                if (n == best) {
                    chosen = &pat;
                    break;
                }
        } else {
            std::vector<const Pattern*> tied;
            for (const auto& [pat, n] : counts)
                if (n == best) tied.push_back(&pat);
            chosen = tied[size_t(rng() % tied.size())];
        }

        const int temp_index = res.rewritten.variables + int(res.temps.size());
        res.temps.push_back({temp_index, chosen->x, chosen->y, chosen->cx, chosen->cy});
        for (LinearForm& f : forms) {
            auto ix = std::find_if(f.begin(), f.end(),
                                   [&](const auto& t) { return t.first == chosen->x; });
            auto iy = std::find_if(f.begin(), f.end(),
                                   [&](const auto& t) { return t.first == chosen->y; });
            if (ix == f.end() || iy == f.end()) continue;
            if (!(normalized_pattern(chosen->x, ix->second, chosen->y, iy->second) == *chosen))
                continue;
            const Rational g = ix->second / chosen->cx;
            f.erase(iy);  // forms are index-sorted and x < y, so ix stays valid
            f.erase(ix);
            f.emplace_back(temp_index, g);  // temp indices exceed all earlier ones
        }
        ++res.iterations;
    }
    res.rewritten.variables += int(res.temps.size());
    return res;
}

namespace {

struct FamilyReduction {
    GreedyResult greedy;
    std::vector<ValueId> var_values;  // original variables then temps
};

LinearFormSet columns_as_forms(const CoeffMatrix& m, Kind kind) {
    LinearFormSet fs;
    fs.variables = m.rows();
    fs.kind = kind;
    fs.forms.resize(size_t(m.cols()));
    for (int c = 0; c < m.cols(); ++c)
        for (int r = 0; r < m.rows(); ++r)
            if (!m(r, c).is_zero()) fs.forms[size_t(c)].emplace_back(r, m(r, c));
    return fs;
}

LinearFormSet rows_as_forms(const CoeffMatrix& m, Kind kind) {
    LinearFormSet fs;
    fs.variables = m.cols();
    fs.kind = kind;
    fs.forms.resize(size_t(m.rows()));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (!m(r, c).is_zero()) fs.forms[size_t(r)].emplace_back(c, m(r, c));
    return fs;
}

std::vector<Term> form_as_terms(const LinearForm& f, const std::vector<ValueId>& var_values) {
    std::vector<Term> ts;
    ts.reserve(f.size());
    for (const auto& [idx, coef] : f) ts.push_back({coef, var_values[size_t(idx)]});
    return ts;
}

// Emits the temporaries of one family in creation order.
void build_temps(SlpBuilder& b, FamilyReduction& fam, const char* prefix) {
    for (size_t k = 0; k < fam.greedy.temps.size(); ++k) {
        const TempDef& t = fam.greedy.temps[k];
        std::vector<Term> terms = {{t.cx, fam.var_values[size_t(t.x)]},
                                   {t.cy, fam.var_values[size_t(t.y)]}};
        fam.var_values.push_back(b.fold_terms(terms, prefix + std::to_string(k)));
    }
}

}  // namespace

std::pair<Slp, ReductionReport> reduce_scheme(const BilinearScheme& scheme,
                                              const ReductionConfig& config) {
    if (config.restarts < 1) throw ArgError("restarts must be >= 1");
    if (config.tie_break == TieBreak::Deterministic && config.restarts != 1)
        throw ArgError("deterministic tie-breaking implies a single restart");
    if (!verify_scheme(scheme).valid())
        throw ArgError("reduce_scheme requires a scheme that verifies Valid");

    const std::int64_t naive_adds = naive_addition_count(scheme).adds_total();
    const int R = scheme.rank();

    std::optional<std::pair<Slp, ReductionReport>> best;
    for (int restart = 0; restart < config.restarts; ++restart) {
        const std::uint64_t seed = config.seed + std::uint64_t(restart);
        auto family_config = [&](int salt) {
            ReductionConfig c;
            c.tie_break = config.tie_break;
            c.seed = seed * 3 + std::uint64_t(salt);
            c.restarts = 1;
            return c;
        };

        SlpBuilder b(scheme.dims());
        FamilyReduction fa, fb, fm;
        fa.greedy = greedy_cse(columns_as_forms(scheme.u(), Kind::A), family_config(0));
        fb.greedy = greedy_cse(columns_as_forms(scheme.v(), Kind::B), family_config(1));
        fm.greedy = greedy_cse(rows_as_forms(scheme.w(), Kind::M), family_config(2));

        for (int i = 0; i < scheme.u().rows(); ++i) fa.var_values.push_back(b.a_input(i));
        for (int i = 0; i < scheme.v().rows(); ++i) fb.var_values.push_back(b.b_input(i));
        build_temps(b, fa, "t");
        build_temps(b, fb, "u");

        for (int r = 0; r < R; ++r) {
            ValueId lhs = b.fold_terms(form_as_terms(fa.greedy.rewritten.forms[size_t(r)],
                                                     fa.var_values), "");
            ValueId rhs = b.fold_terms(form_as_terms(fb.greedy.rewritten.forms[size_t(r)],
                                                     fb.var_values), "");
            fm.var_values.push_back(b.add_mul(lhs, rhs, "M" + std::to_string(r)));
        }
        build_temps(b, fm, "v");

        for (int c = 0; c < scheme.w().rows(); ++c) {
            auto terms = form_as_terms(fm.greedy.rewritten.forms[size_t(c)], fm.var_values);
            const std::string cname = "C" + std::to_string(c);
            ValueId v = (terms.size() == 1 && terms[0].coef.is_one())
                            ? terms[0].value
                            : b.fold_terms(terms, cname);
            b.set_output(c, v);
        }

        Slp slp = rebalance_negations(b.finish());
        ReductionReport rep;
        rep.input_naive_additions = naive_adds;
        rep.output_additions = slp_addition_count(slp).adds_total();
        rep.temps_a = int(fa.greedy.temps.size());
        rep.temps_b = int(fb.greedy.temps.size());
        rep.temps_m = int(fm.greedy.temps.size());
        rep.seed_used = seed;
        rep.iterations = fa.greedy.iterations + fb.greedy.iterations + fm.greedy.iterations;
        rep.restarts_run = config.restarts;

        if (!best || rep.output_additions < best->second.output_additions)
            best.emplace(std::move(slp), rep);
    }
    return std::move(*best);
}

Slp rebalance_negations(const Slp& slp) {
    auto lines = decompose_lines(slp);
    for (SlpLine& line : lines) {
        rotate_leading_positive(line.terms);
        rotate_leading_positive(line.a_terms);
        rotate_leading_positive(line.b_terms);
    }
    return build_slp_from_lines(slp.dims, lines);
}

}  // namespace fmm
