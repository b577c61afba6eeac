#include "fmm/slp.hpp"

#include <algorithm>
#include <cctype>

#include "fmm/errors.hpp"

namespace fmm {

namespace {

ValueId dst_of(const Slp::Instr& ins) {
    return std::visit([](const auto& i) { return i.dst; }, ins);
}

template <typename Fn>
void for_each_src(const Slp::Instr& ins, Fn&& fn) {
    if (const auto* lin = std::get_if<Slp::Lin>(&ins)) {
        fn(lin->src1);
        fn(lin->src2);
    } else if (const auto* sc = std::get_if<Slp::Scale>(&ins)) {
        fn(sc->src);
    } else {
        const auto& mul = std::get<Slp::Mul>(ins);
        fn(mul.a);
        fn(mul.b);
    }
}

}  // namespace

int Slp::mul_count() const {
    int k = 0;
    for (const auto& ins : instrs)
        if (std::holds_alternative<Mul>(ins)) ++k;
    return k;
}

void validate(const Slp& slp) {
    const size_t nv = slp.num_values();
    const size_t inputs = size_t(slp.num_inputs_a() + slp.num_inputs_b());
    if (slp.dims.n < 1 || slp.dims.m < 1 || slp.dims.p < 1)
        throw ArgError("program dims must be positive");
    if (slp.kinds.size() != nv || slp.names.size() != nv)
        throw ArgError("value table sizes disagree");
    if (nv < inputs) throw ArgError("value table smaller than the input set");
    for (int i = 0; i < slp.num_inputs_a(); ++i)
        if (slp.kinds[size_t(i)] != Kind::A) throw KindError("A input with non-A kind");
    for (int i = 0; i < slp.num_inputs_b(); ++i)
        if (slp.kinds[size_t(slp.b_input(i))] != Kind::B)
            throw KindError("B input with non-B kind");

    std::vector<int> uses(nv, 0);
    ValueId next = ValueId(inputs);
    for (const auto& ins : slp.instrs) {
        const ValueId dst = dst_of(ins);
        if (dst != next)
            throw SsaError("value " + std::to_string(dst) + " defined out of order");
        ++next;
        for_each_src(ins, [&](ValueId s) {
            if (s < 0 || s >= dst)
                throw SsaError("use of undefined value " + std::to_string(s));
            ++uses[size_t(s)];
        });
        if (const auto* lin = std::get_if<Slp::Lin>(&ins)) {
            if (lin->c1.is_zero() || lin->c2.is_zero())
                throw ArgError("linear op with zero coefficient");
            if (slp.kinds[size_t(lin->src1)] != slp.kinds[size_t(lin->src2)])
                throw KindError("linear op over mixed kinds");
            if (slp.kinds[size_t(dst)] != slp.kinds[size_t(lin->src1)])
                throw KindError("linear op changes kind");
        } else if (const auto* sc = std::get_if<Slp::Scale>(&ins)) {
            if (sc->c.is_zero() || sc->c.is_one())
                throw ArgError("scale coefficient must not be 0 or 1");
            if (slp.kinds[size_t(dst)] != slp.kinds[size_t(sc->src)])
                throw KindError("scale changes kind");
        } else {
            const auto& mul = std::get<Slp::Mul>(ins);
            if (slp.kinds[size_t(mul.a)] != Kind::A || slp.kinds[size_t(mul.b)] != Kind::B)
                throw KindError("product operands must be (A-linear, B-linear)");
            if (slp.kinds[size_t(dst)] != Kind::M) throw KindError("product must define an M value");
        }
    }
    if (size_t(next) != nv) throw SsaError("values without a defining instruction");

    if (slp.outputs.size() != size_t(slp.dims.n * slp.dims.p))
        throw ArgError("output table must map every C entry");
    for (ValueId v : slp.outputs) {
        if (v < 0 || size_t(v) >= nv) throw SsaError("output maps to an undefined value");
        ++uses[size_t(v)];
    }

    // anonymous accumulators feed exactly one consumer
    for (size_t v = inputs; v < nv; ++v)
        if (slp.names[v].empty() && uses[v] != 1)
            throw SsaError("anonymous value " + std::to_string(v) + " has " +
                           std::to_string(uses[v]) + " uses");
}

OpCountReport slp_addition_count(const Slp& slp) {
    OpCountReport rep;
    for (const auto& ins : slp.instrs) {
        if (std::holds_alternative<Slp::Mul>(ins)) {
            ++rep.muls;
        } else if (const auto* sc = std::get_if<Slp::Scale>(&ins)) {
            // scaling by -1 is a plain negation, free like the rings treat it
            if (!sc->c.is_unit()) ++rep.scales;
        } else {
            const auto& lin = std::get<Slp::Lin>(ins);
            switch (slp.kinds[size_t(lin.dst)]) {
                case Kind::A: ++rep.adds_a; break;
                case Kind::B: ++rep.adds_b; break;
                case Kind::M: ++rep.adds_c; break;
            }
            if (!lin.c1.is_unit()) ++rep.scales;
            if (!lin.c2.is_unit()) ++rep.scales;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------
// Builder

SlpBuilder::SlpBuilder(Dims dims) {
    if (dims.n < 1 || dims.m < 1 || dims.p < 1) throw ArgError("program dims must be positive");
    slp_.dims = dims;
    for (int i = 0; i < dims.n * dims.m; ++i) new_value(Kind::A, "A" + std::to_string(i));
    for (int i = 0; i < dims.m * dims.p; ++i) new_value(Kind::B, "B" + std::to_string(i));
    slp_.outputs.assign(size_t(dims.n * dims.p), ValueId(-1));
}

ValueId SlpBuilder::new_value(Kind k, const std::string& name) {
    if (!name.empty() && find(name) >= 0) throw SsaError("duplicate definition of '" + name + "'");
    slp_.kinds.push_back(k);
    slp_.names.push_back(name);
    return ValueId(slp_.kinds.size() - 1);
}

ValueId SlpBuilder::find(const std::string& name) const {
    for (size_t i = 0; i < slp_.names.size(); ++i)
        if (slp_.names[i] == name) return ValueId(i);
    return -1;
}

ValueId SlpBuilder::fold_terms(const std::vector<Term>& terms, const std::string& dst_name) {
    if (terms.empty()) throw ArgError("cannot fold an empty combination");
    const Kind k = kind_of(terms[0].value);
    for (const Term& t : terms) {
        if (t.coef.is_zero()) throw ArgError("zero coefficient in combination");
        if (kind_of(t.value) != k) throw KindError("combination over mixed kinds");
    }
    if (terms.size() == 1) {
        if (terms[0].coef.is_one()) {
            if (!dst_name.empty()) throw SsaError("alias '" + dst_name + "' needs no instruction");
            return terms[0].value;
        }
        ValueId dst = new_value(k, dst_name);
        slp_.instrs.push_back(Slp::Scale{dst, terms[0].value, terms[0].coef});
        return dst;
    }
    ValueId acc = -1;
    for (size_t i = 1; i < terms.size(); ++i) {
        const bool last = i + 1 == terms.size();
        ValueId dst = new_value(k, last ? dst_name : "");
        if (i == 1)
            slp_.instrs.push_back(Slp::Lin{dst, terms[0].value, terms[1].value,
                                           terms[0].coef, terms[1].coef});
        else
            slp_.instrs.push_back(Slp::Lin{dst, acc, terms[i].value, Rational(1), terms[i].coef});
        acc = dst;
    }
    return acc;
}

ValueId SlpBuilder::add_mul(ValueId a, ValueId b, const std::string& dst_name) {
    if (kind_of(a) != Kind::A || kind_of(b) != Kind::B)
        throw KindError("product operands must be (A-linear, B-linear)");
    ValueId dst = new_value(Kind::M, dst_name);
    slp_.instrs.push_back(Slp::Mul{dst, a, b});
    return dst;
}

void SlpBuilder::set_output(int c, ValueId v) {
    if (c < 0 || size_t(c) >= slp_.outputs.size())
        throw ArgError("output index C" + std::to_string(c) + " out of range");
    if (slp_.outputs[size_t(c)] >= 0)
        throw SsaError("output C" + std::to_string(c) + " defined twice");
    slp_.outputs[size_t(c)] = v;
}

Slp SlpBuilder::finish() {
    for (size_t c = 0; c < slp_.outputs.size(); ++c)
        if (slp_.outputs[c] < 0)
            throw SsaError("output C" + std::to_string(c) + " never defined");
    validate(slp_);
    return std::move(slp_);
}

// ---------------------------------------------------------------------

Slp scheme_to_naive_slp(const BilinearScheme& scheme) {
    SlpBuilder b(scheme.dims());
    const int R = scheme.rank();
    std::vector<ValueId> products;
    products.resize(size_t(R));
    for (int r = 0; r < R; ++r) {
        std::vector<Term> at, bt;
        for (int a = 0; a < scheme.u().rows(); ++a)
            if (!scheme.u()(a, r).is_zero()) at.push_back({scheme.u()(a, r), b.a_input(a)});
        for (int v = 0; v < scheme.v().rows(); ++v)
            if (!scheme.v()(v, r).is_zero()) bt.push_back({scheme.v()(v, r), b.b_input(v)});
        ValueId lhs = b.fold_terms(at, "");
        ValueId rhs = b.fold_terms(bt, "");
        products[size_t(r)] = b.add_mul(lhs, rhs, "M" + std::to_string(r));
    }
    for (int c = 0; c < scheme.w().rows(); ++c) {
        std::vector<Term> terms;
        for (int r = 0; r < R; ++r)
            if (!scheme.w()(c, r).is_zero()) terms.push_back({scheme.w()(c, r), products[size_t(r)]});
        if (terms.empty())
            throw ArgError("output C" + std::to_string(c) + " uses no product");
        const std::string cname = "C" + std::to_string(c);
        ValueId v;
        if (terms.size() == 1 && terms[0].coef.is_one())
            v = terms[0].value;  // plain alias, no instruction
        else
            v = b.fold_terms(terms, cname);
        b.set_output(c, v);
    }
    return b.finish();
}

// ---------------------------------------------------------------------
// Line recovery

namespace {

struct LineScanner {
    const Slp& slp;
    std::vector<const Slp::Instr*> def;  // per value, null for inputs

    explicit LineScanner(const Slp& s) : slp(s), def(s.num_values(), nullptr) {
        for (const auto& ins : s.instrs) def[size_t(dst_of(ins))] = &ins;
    }

    bool anonymous(ValueId v) const { return slp.names[size_t(v)].empty(); }

    // Expands a value into the term list of its rendered combination.
    std::vector<Term> expand(ValueId v) const {
        if (!anonymous(v)) return {Term{Rational(1), v}};
        const Slp::Instr* ins = def[size_t(v)];
        if (ins == nullptr) throw SsaError("anonymous input value");
        if (const auto* sc = std::get_if<Slp::Scale>(ins)) {
            if (anonymous(sc->src)) throw SsaError("scaled anonymous accumulator");
            return {Term{sc->c, sc->src}};
        }
        if (const auto* lin = std::get_if<Slp::Lin>(ins)) {
            std::vector<Term> terms;
            if (anonymous(lin->src1)) {
                if (!lin->c1.is_one()) throw SsaError("chain accumulator with non-unit coefficient");
                terms = expand(lin->src1);
            } else {
                terms.push_back({lin->c1, lin->src1});
            }
            if (anonymous(lin->src2)) throw SsaError("chain extends on the right");
            terms.push_back({lin->c2, lin->src2});
            return terms;
        }
        throw SsaError("anonymous product");
    }
};

}  // namespace

std::vector<SlpLine> decompose_lines(const Slp& slp) {
    LineScanner scan(slp);
    auto named = [&](const std::vector<Term>& ts) {
        std::vector<LineTerm> out;
        out.reserve(ts.size());
        for (const Term& t : ts) out.push_back({t.coef, slp.names[size_t(t.value)]});
        return out;
    };
    std::vector<SlpLine> lines;
    for (const auto& ins : slp.instrs) {
        const ValueId dst = dst_of(ins);
        if (scan.anonymous(dst)) continue;  // folded into its consumer
        SlpLine line;
        line.dst_name = slp.names[size_t(dst)];
        if (const auto* mul = std::get_if<Slp::Mul>(&ins)) {
            line.op = SlpLine::Op::Product;
            line.a_terms = named(scan.expand(mul->a));
            line.b_terms = named(scan.expand(mul->b));
        } else if (const auto* sc = std::get_if<Slp::Scale>(&ins)) {
            line.op = SlpLine::Op::Scaled;
            line.terms = named({Term{sc->c, sc->src}});
        } else {
            const auto& lin = std::get<Slp::Lin>(ins);
            line.op = SlpLine::Op::Linear;
            std::vector<Term> terms;
            if (scan.anonymous(lin.src1)) {
                if (!lin.c1.is_one()) throw SsaError("chain accumulator with non-unit coefficient");
                terms = scan.expand(lin.src1);
            } else {
                terms.push_back({lin.c1, lin.src1});
            }
            terms.push_back({lin.c2, lin.src2});
            line.terms = named(terms);
        }
        lines.push_back(std::move(line));
    }
    for (size_t c = 0; c < slp.outputs.size(); ++c) {
        const ValueId v = slp.outputs[c];
        const std::string cname = "C" + std::to_string(c);
        if (slp.names[size_t(v)] == cname) continue;
        SlpLine alias;
        alias.op = SlpLine::Op::Alias;
        alias.dst_name = cname;
        alias.terms = {LineTerm{Rational(1), slp.names[size_t(v)]}};
        lines.push_back(std::move(alias));
    }
    return lines;
}

bool rotate_leading_positive(std::vector<LineTerm>& terms) {
    size_t first_pos = terms.size();
    for (size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].coef.sign() > 0) {
            first_pos = i;
            break;
        }
    }
    if (first_pos == terms.size()) return false;
    std::rotate(terms.begin(), terms.begin() + long(first_pos), terms.end());
    return true;
}

namespace {

std::optional<int> output_index(const std::string& name) {
    if (name.size() < 2 || name[0] != 'C') return std::nullopt;
    for (size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
    return std::stoi(name.substr(1));
}

}  // namespace

Slp build_slp_from_lines(Dims dims, const std::vector<SlpLine>& lines) {
    SlpBuilder b(dims);
    auto resolve = [&b](const std::vector<LineTerm>& lts) {
        std::vector<Term> ts;
        ts.reserve(lts.size());
        for (const LineTerm& lt : lts) {
            ValueId v = b.find(lt.name);
            if (v < 0) throw SsaError("use of undefined value '" + lt.name + "'");
            ts.push_back({lt.coef, v});
        }
        return ts;
    };
    for (const SlpLine& line : lines) {
        const auto out = output_index(line.dst_name);
        ValueId dst;
        switch (line.op) {
            case SlpLine::Op::Product: {
                ValueId lhs = b.fold_terms(resolve(line.a_terms), "");
                ValueId rhs = b.fold_terms(resolve(line.b_terms), "");
                dst = b.add_mul(lhs, rhs, line.dst_name);
                break;
            }
            case SlpLine::Op::Alias: {
                if (!out) throw SsaError("alias '" + line.dst_name + "' must name an output");
                auto ts = resolve(line.terms);
                if (ts.size() != 1 || !ts[0].coef.is_one())
                    throw ArgError("alias must be a single unit term");
                dst = ts[0].value;
                break;
            }
            case SlpLine::Op::Linear:
            case SlpLine::Op::Scaled:
                dst = b.fold_terms(resolve(line.terms), line.dst_name);
                break;
            default:
                throw ArgError("unknown line kind");
        }
        if (out) b.set_output(*out, dst);
    }
    return b.finish();
}

}  // namespace fmm
