#include "quatsylv/sylvester.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "quatsylv/instances.hpp"

namespace quatsylv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNoiseGate = 16.0;  // multiplier turning a noise bound into a rank floor

// Tensor value carrying a first-order bound on the rounding noise of its
// entries.  Rank decisions treat singular values below kNoiseGate * noise as
// zero, which is what keeps structurally-zero intermediates (for example
// C2 *_N L_M when the projected rank does not drop) from poisoning the
// cascade with ~1e16 pseudo-inverses.
struct NT {
    QTensor t;
    double noise = 0.0;
    double norm = 0.0;

    NT() = default;
    explicit NT(QTensor v) : t(std::move(v)) {
        norm = t.fro_norm();
        noise = kEps * norm;
    }
    NT(QTensor v, double n) : t(std::move(v)), noise(n) { norm = t.fro_norm(); }
};

NT nt_exact(QTensor v) { return NT(std::move(v), 0.0); }

NT operator*(const NT& a, const NT& b) {
    return NT(einstein_product(a.t, b.t),
              a.noise * b.norm + a.norm * b.noise + kEps * a.norm * b.norm);
}
NT operator+(const NT& a, const NT& b) {
    return NT(a.t + b.t, a.noise + b.noise + kEps * (a.norm + b.norm));
}
NT operator-(const NT& a, const NT& b) {
    return NT(a.t - b.t, a.noise + b.noise + kEps * (a.norm + b.norm));
}
NT operator-(const NT& a) { return NT(-a.t, a.noise); }

NT nt_row_block(const NT& a, const NT& b) {
    return NT(row_block(a.t, b.t), a.noise + b.noise);
}
NT nt_column_block(const NT& a, const NT& b) {
    return NT(column_block(a.t, b.t), a.noise + b.noise);
}

struct SvdTriple {
    NT pinv, left, right;
};

SvdTriple svd_triple(const NT& a, const RankTolerance& tol) {
    const double floor = kNoiseGate * a.noise;
    const QuatMatrix m = flatten(a.t);
    const SvdOps ops = svd_ops(m, tol, floor);
    SvdTriple out;
    const double smin = ops.rank > 0 ? ops.sigma_kept_min : 0.0;
    const double pn = ops.rank > 0 ? a.noise / (smin * smin) + kEps / smin : kEps;
    const double jn = ops.rank > 0 ? a.noise / smin + kEps : kEps;
    out.pinv = NT(unflatten(ops.pinv, a.t.shape().transposed()), pn);
    out.left = NT(unflatten(ops.left, Shape(a.t.shape().cols, a.t.shape().cols)), jn);
    out.right = NT(unflatten(ops.right, Shape(a.t.shape().rows, a.t.shape().rows)), jn);
    return out;
}

// Parameter bag: free parameters are drawn by policy on first use (keyed by
// name), solved parameters are inserted by the stage resolutions.
struct ParamBag {
    FreeParams fp;
    ToleranceConfig tol;
    std::map<std::string, NT> values;
    std::vector<std::pair<std::string, QTensor>> drawn;

    const NT& free(const std::string& name, const Shape& shape) {
        auto it = values.find(name);
        if (it != values.end()) return it->second;
        QTensor v(shape);
        if (fp.policy == FreeParams::Policy::random) {
            Rng rng = Rng::keyed(fp.seed, name);
            v = random_tensor(rng, shape);
        }
        drawn.emplace_back(name, v);
        auto [pos, _] = values.emplace(name, NT(v));
        return pos->second;
    }
    void put(const std::string& name, NT v) { values.insert_or_assign(name, std::move(v)); }
    const NT& at(const std::string& name) const { return values.at(name); }
};

struct Mid {
    NT l, r;
    std::string name;
};

// Affine solution family: value = part + left * p(lname) + p(rname) * right
// (+ mid.l * p(mid.name) * mid.r).
struct Fam {
    NT part;
    NT left;
    std::string lname;
    NT right;
    std::string rname;
    std::optional<Mid> mid;

    Shape left_shape() const { return Shape(left.t.shape().cols, part.t.shape().cols); }
    Shape right_shape() const { return Shape(part.t.shape().rows, right.t.shape().rows); }

    NT eval(ParamBag& bag) const {
        bag.free(lname, left_shape());
        bag.free(rname, right_shape());
        NT v = part + left * bag.at(lname) + bag.at(rname) * right;
        if (mid) {
            bag.free(mid->name, Shape(mid->l.t.shape().cols, mid->r.t.shape().rows));
            v = v + mid->l * bag.at(mid->name) * mid->r;
        }
        return v;
    }
};

struct CondSink {
    ConsistencyReport* report = nullptr;
    double cond_rtol = 1e-9;

    void add(const std::string& id, const std::string& term,
             std::initializer_list<const NT*> factors) {
        if (!report) return;
        NT prod = **factors.begin();
        double scale = prod.norm;
        bool first = true;
        for (const NT* f : factors) {
            if (first) {
                first = false;
                continue;
            }
            prod = prod * *f;
            scale *= f->norm;
        }
        ConditionResult c;
        c.id = id;
        c.term = term;
        c.residual = prod.norm;
        c.threshold = cond_rtol * std::max(1.0, scale);
        c.pass = c.residual <= c.threshold;
        report->add(std::move(c));
    }
};

struct CacheSink {
    DerivationCache* cache = nullptr;
    void put(const std::string& stage, const std::string& name, const NT& v) {
        if (cache) cache->put(stage, name, v.t);
    }
};

// General solution family of A *_N X *_M B = E (conditions R_A E = 0, E L_B = 0).
Fam axb_family(const NT& A, const NT& B, const NT& E, const std::string& pname,
               const RankTolerance& rt) {
    const SvdTriple sa = svd_triple(A, rt);
    const SvdTriple sb = svd_triple(B, rt);
    Fam f;
    f.part = sa.pinv * E * sb.pinv;
    f.left = sa.left;
    f.lname = pname + ".W1";
    f.right = sb.right;
    f.rname = pname + ".W2";
    return f;
}

void axb_conditions(CondSink& sink, const std::string& id_a, const std::string& id_b,
                    const std::string& sym, const NT& A, const NT& B, const NT& E,
                    const RankTolerance& rt) {
    const SvdTriple sa = svd_triple(A, rt);
    const SvdTriple sb = svd_triple(B, rt);
    sink.add(id_a, "R_" + sym + ".A * " + sym + ".E", {&sa.right, &E});
    sink.add(id_b, sym + ".E * L_" + sym + ".B", {&E, &sb.left});
}

// Families for C X D + C2 X2 D2 = E (X in the first slot).  The particular
// parts come from the staged reduction: project by R_C, solve the projected
// equation for X2, enforce the L_D constraint, back-substitute for X.
struct TwoTermFams {
    Fam x, x2;
};

TwoTermFams two_term_families(const NT& C, const NT& D, const NT& C2, const NT& D2,
                              const NT& E, const std::string& prefix,
                              const std::string& midname, CondSink& sink,
                              const std::string& id_ab, const std::string& id_cd,
                              const std::string& sym, const RankTolerance& rt,
                              CacheSink& cache, const std::string& stage) {
    const SvdTriple sc = svd_triple(C, rt);
    const SvdTriple sd = svd_triple(D, rt);
    const SvdTriple sc2 = svd_triple(C2, rt);
    const SvdTriple sd2 = svd_triple(D2, rt);
    const NT M = sc.right * C2;
    const NT N = D2 * sd.left;
    const SvdTriple sm = svd_triple(M, rt);
    const NT S = C2 * sm.left;
    const SvdTriple sn = svd_triple(N, rt);
    const SvdTriple ss = svd_triple(S, rt);
    cache.put(stage, sym + ".M", M);
    cache.put(stage, sym + ".N", N);
    cache.put(stage, sym + ".S", S);

    sink.add(id_ab, "R_" + sym + ".M * R_" + sym + ".C * " + sym + ".E",
             {&sm.right, &sc.right, &E});
    sink.add(id_ab, sym + ".E * L_" + sym + ".D * L_" + sym + ".N",
             {&E, &sd.left, &sn.left});
    sink.add(id_cd, "R_" + sym + ".C * " + sym + ".E * L_" + sym + ".D2",
             {&sc.right, &E, &sd2.left});
    sink.add(id_cd, "R_" + sym + ".C2 * " + sym + ".E * L_" + sym + ".D",
             {&sc2.right, &E, &sd.left});

    const NT proj = sm.pinv * sc.right * E * sd2.pinv;  // particular of the projected solve
    const NT G = E * sd.left - C2 * proj * D2 * sd.left;
    cache.put(stage, sym + ".G", G);
    TwoTermFams out;
    out.x2.part = proj + ss.pinv * G * sn.pinv;
    out.x2.left = sm.left * ss.left;
    out.x2.lname = prefix + ".U1";
    out.x2.right = sd2.right;
    out.x2.rname = prefix + ".U3";
    out.x2.mid = Mid{sm.left, sn.right, midname};

    out.x.part = sc.pinv * (E - C2 * out.x2.part * D2) * sd.pinv;
    out.x.left = sc.left;
    out.x.lname = prefix + ".U4";
    out.x.right = sd.right;
    out.x.rname = prefix + ".U5";
    out.x.mid = Mid{-(sc.pinv * S), sn.right * D2 * sd.pinv, midname};
    return out;
}

// Equate two families of the same tensor: block ax+yb stage
//   [A.left | -B.left] * [pA; pB] + [qA | qB] * [A.right; -B.right]
//     = (B.part - A.part) + B.midterm - A.midterm.
struct EqStage {
    std::string tag;
    Fam famA, famB;
    NT AL, BR, base;
    std::vector<std::pair<double, Mid>> mids;  // sign, term
    SvdTriple sAL, sBR;

    EqStage(std::string tag_, Fam a, Fam b, const RankTolerance& rt)
        : tag(std::move(tag_)), famA(std::move(a)), famB(std::move(b)) {
        AL = nt_row_block(famA.left, -famB.left);
        BR = nt_column_block(famA.right, -famB.right);
        base = famB.part - famA.part;
        if (famB.mid) mids.emplace_back(+1.0, *famB.mid);
        if (famA.mid) mids.emplace_back(-1.0, *famA.mid);
        sAL = svd_triple(AL, rt);
        sBR = svd_triple(BR, rt);
    }

    // Reduced coefficients of mid #i: (R_AL * sign*L, R * L_BR).
    std::pair<NT, NT> reduced_coeff(std::size_t i) const {
        const auto& [sign, m] = mids[i];
        NT lc = sAL.right * (sign < 0 ? -m.l : m.l);
        NT rc = m.r * sBR.left;
        return {std::move(lc), std::move(rc)};
    }
    NT reduced_rhs() const { return -(sAL.right * base * sBR.left); }

    NT rhs_with(ParamBag& bag) const {
        NT v = base;
        for (const auto& [sign, m] : mids) {
            bag.free(m.name, Shape(m.l.t.shape().cols, m.r.t.shape().rows));
            NT term = m.l * bag.at(m.name) * m.r;
            v = sign < 0 ? v - term : v + term;
        }
        return v;
    }

    // ax+yb solve; deposits the four family parameters into the bag.
    void solve(ParamBag& bag) const {
        const NT rhs = rhs_with(bag);
        const NT& V1 = bag.free(tag + ".V1", Shape(AL.t.shape().cols, BR.t.shape().rows));
        const NT& V2 = bag.free(tag + ".V2", Shape(AL.t.shape().cols, rhs.t.shape().cols));
        const NT& V3 = bag.free(tag + ".V3", Shape(AL.t.shape().rows, BR.t.shape().rows));
        NT X = sAL.pinv * rhs - V1 * BR + sAL.left * V2;
        NT Y = sAL.right * rhs * sBR.pinv + AL * V1 + V3 * sBR.right;
        auto [topX, botX] = split_column_block(X.t, famA.left.t.shape().cols);
        auto [leftY, rightY] = split_row_block(Y.t, famA.right.t.shape().rows);
        bag.put(famA.lname, NT(std::move(topX), X.noise));
        bag.put(famB.lname, NT(std::move(botX), X.noise));
        bag.put(famA.rname, NT(std::move(leftY), Y.noise));
        bag.put(famB.rname, NT(std::move(rightY), Y.noise));
    }
};

struct CascadeInput {
    // three chained two-term problems producing families for (Z_i, Z_{i+1})
    struct Hat {
        NT C, D, C2, D2, E;
    };
    std::array<Hat, 3> hat;
    NT F4, G4, E4, H4, J4, E5;
    // condition ids: {hat_ab, hat_cd, singles, mid_axb, eq_two_ab, eq_two_cd,
    //                 deep_two_ab, deep_two_cd, mid_single, deep_single, final}
    bool full_numbering = true;
};

std::string cid(const CascadeInput& in, const char* which) {
    const bool f = in.full_numbering;
    const std::string w(which);
    if (w == "hat_ab") return f ? "3.4" : "4.3";
    if (w == "hat_cd") return f ? "3.5" : "4.4";
    if (w == "singles") return f ? "3.6" : "4.5";
    if (w == "mid_axb") return f ? "3.7" : "4.6";
    if (w == "eq_ab") return f ? "3.8" : "4.7";
    if (w == "eq_cd") return f ? "3.9" : "4.8";
    if (w == "deep_ab") return f ? "3.10" : "4.9";
    if (w == "deep_cd") return f ? "3.11" : "4.10";
    if (w == "mid_single") return f ? "3.12" : "4.11";
    if (w == "deep_single") return f ? "3.13" : "4.12";
    return f ? "3.14" : "4.13";
}

struct Cascade {
    // families for the five equations
    std::array<std::optional<TwoTermFams>, 3> hat;
    Fam z1s, z4s;
    std::optional<EqStage> s38, s39, s47, s48, s52, s56, s57, s62, s63, s68;
    Fam u2a, k2a;                       // from the 3.40/3.43-type solves
    std::optional<TwoTermFams> tt49, tt50, tt53;
    Fam p44b, q55b, k44a, k44b;         // from the 3.58/3.59/3.64/3.65-type solves
};

// Forward pass: build every family and stage, recording all conditions.
Cascade cascade_forward(const CascadeInput& in, CondSink& sink, CacheSink& cache,
                        const RankTolerance& rt) {
    Cascade c;
    static const char* midnames[3] = {"U2h", "V2h", "K2h"};
    for (int i = 0; i < 3; ++i) {
        const auto& h = in.hat[i];
        const std::string sym = "hat" + std::to_string(i + 1);
        c.hat[i] = two_term_families(h.C, h.D, h.C2, h.D2, h.E, sym, midnames[i], sink,
                                     cid(in, "hat_ab"), cid(in, "hat_cd"), sym, rt, cache,
                                     sym);
    }
    axb_conditions(sink, cid(in, "singles"), cid(in, "singles"), "eq4", in.F4, in.G4,
                   in.E4, rt);
    axb_conditions(sink, cid(in, "singles"), cid(in, "singles"), "eq5", in.H4, in.J4,
                   in.E5, rt);
    c.z1s = axb_family(in.F4, in.G4, in.E4, "eq4", rt);
    c.z4s = axb_family(in.H4, in.J4, in.E5, "eq5", rt);

    c.s38.emplace("s38", c.z1s, c.hat[0]->x, rt);
    c.s39.emplace("s39", c.z4s, c.hat[2]->x2, rt);
    c.s47.emplace("s47", c.hat[0]->x2, c.hat[1]->x, rt);
    c.s48.emplace("s48", c.hat[1]->x2, c.hat[2]->x, rt);

    {
        auto [C40, D40] = c.s38->reduced_coeff(0);
        const NT E40 = c.s38->reduced_rhs();
        cache.put("s38", "A11h", C40);
        cache.put("s38", "B11h", D40);
        cache.put("s38", "E11h", E40);
        axb_conditions(sink, cid(in, "mid_axb"), cid(in, "mid_axb"), "k1", C40, D40, E40, rt);
        c.u2a = axb_family(C40, D40, E40, "s40", rt);
    }
    {
        auto [C43, D43] = c.s39->reduced_coeff(0);
        const NT E43 = c.s39->reduced_rhs();
        cache.put("s39", "A22h", C43);
        cache.put("s39", "B22h", D43);
        cache.put("s39", "E22h", E43);
        axb_conditions(sink, cid(in, "mid_axb"), cid(in, "mid_axb"), "k2", C43, D43, E43, rt);
        c.k2a = axb_family(C43, D43, E43, "s43", rt);
    }
    {
        auto [F11, G11] = c.s47->reduced_coeff(0);  // V2h slot
        auto [H11, J11] = c.s47->reduced_coeff(1);  // U2h slot
        const NT E49 = c.s47->reduced_rhs();
        cache.put("s49", "Ebar11", E49);
        c.tt49 = two_term_families(F11, G11, H11, J11, E49, "s49", "P44", sink,
                                   cid(in, "eq_ab"), cid(in, "eq_cd"), "bar1", rt, cache,
                                   "s49");
        // align the parameter names with the shared-mid structure of the display
        c.tt49->x.lname = "P55";
        c.tt49->x.rname = "P66";
        c.tt49->x2.lname = "Q44";
        c.tt49->x2.rname = "Q66";
    }
    {
        auto [F22, G22] = c.s48->reduced_coeff(0);  // K2h slot
        auto [H22, J22] = c.s48->reduced_coeff(1);  // V2h slot
        const NT E50 = c.s48->reduced_rhs();
        cache.put("s50", "Ebar22", E50);
        c.tt50 = two_term_families(F22, G22, H22, J22, E50, "s50", "Q55", sink,
                                   cid(in, "eq_ab"), cid(in, "eq_cd"), "bar2", rt, cache,
                                   "s50");
        c.tt50->x.lname = "P77";
        c.tt50->x.rname = "P88";
        c.tt50->x2.lname = "Q77";
        c.tt50->x2.rname = "Q88";
    }
    c.s52.emplace("s52", c.tt49->x, c.tt50->x2, rt);
    {
        auto [FF, GG] = c.s52->reduced_coeff(1);  // A-side mid P44 takes the first slot
        auto [HH, JJ] = c.s52->reduced_coeff(0);  // B-side mid Q55
        const NT E53 = c.s52->reduced_rhs();
        cache.put("s53", "EE11", E53);
        c.tt53 = two_term_families(FF, GG, HH, JJ, E53, "s53", "K44", sink,
                                   cid(in, "deep_ab"), cid(in, "deep_cd"), "dbar", rt,
                                   cache, "s53");
        c.tt53->x.lname = "K55";
        c.tt53->x.rname = "K66";
        c.tt53->x2.lname = "K77";
        c.tt53->x2.rname = "K88";
    }
    c.s56.emplace("s56", c.tt49->x2, c.u2a, rt);
    {
        auto [C11, D11] = c.s56->reduced_coeff(0);  // mid P44
        const NT E58 = c.s56->reduced_rhs();
        cache.put("s58", "Ct11", C11);
        cache.put("s58", "Dt11", D11);
        cache.put("s58", "Et11", E58);
        axb_conditions(sink, cid(in, "mid_single"), cid(in, "mid_single"), "j1", C11, D11,
                       E58, rt);
        c.p44b = axb_family(C11, D11, E58, "s58", rt);
    }
    c.s57.emplace("s57", c.k2a, c.tt50->x, rt);
    {
        auto [C22, D22] = c.s57->reduced_coeff(0);  // mid Q55
        const NT E59 = c.s57->reduced_rhs();
        cache.put("s59", "Ct22", C22);
        cache.put("s59", "Dt22", D22);
        cache.put("s59", "Et22", E59);
        axb_conditions(sink, cid(in, "mid_single"), cid(in, "mid_single"), "j2", C22, D22,
                       E59, rt);
        c.q55b = axb_family(C22, D22, E59, "s59", rt);
    }
    c.s62.emplace("s62", c.p44b, c.tt53->x, rt);
    {
        auto [H1, J1] = c.s62->reduced_coeff(0);  // mid K44
        const NT E64 = c.s62->reduced_rhs();
        cache.put("s64", "Ht11", H1);
        cache.put("s64", "Jt11", J1);
        cache.put("s64", "Et11d", E64);
        axb_conditions(sink, cid(in, "deep_single"), cid(in, "deep_single"), "l1", H1, J1,
                       E64, rt);
        c.k44a = axb_family(H1, J1, E64, "s64", rt);
    }
    c.s63.emplace("s63", c.tt53->x2, c.q55b, rt);
    {
        auto [H2, J2] = c.s63->reduced_coeff(0);  // mid K44
        const NT E65 = c.s63->reduced_rhs();
        cache.put("s65", "Ht22", H2);
        cache.put("s65", "Jt22", J2);
        cache.put("s65", "Et22d", E65);
        axb_conditions(sink, cid(in, "deep_single"), cid(in, "deep_single"), "l2", H2, J2,
                       E65, rt);
        c.k44b = axb_family(H2, J2, E65, "s65", rt);
    }
    c.s68.emplace("s68", c.k44a, c.k44b, rt);
    {
        const NT Et = c.s68->base;
        cache.put("s68", "At", c.s68->AL);
        cache.put("s68", "Bt", c.s68->BR);
        cache.put("s68", "Et", Et);
        if (sink.report) {
            NT res = c.s68->sAL.right * Et * c.s68->sBR.left;
            ConditionResult cr;
            cr.id = cid(in, "final");
            cr.term = "R_At * Et * L_Bt";
            cr.residual = res.norm;
            cr.threshold = sink.cond_rtol *
                           std::max(1.0, c.s68->sAL.right.norm * Et.norm * c.s68->sBR.left.norm);
            cr.pass = cr.residual <= cr.threshold;
            sink.report->add(std::move(cr));
        }
    }
    return c;
}

// Backward pass: resolve the shared parameters bottom-up, then assemble Z1..Z4.
std::map<std::string, QTensor> cascade_backward(Cascade& c, ParamBag& bag,
                                                CacheSink& cache) {
    c.s68->solve(bag);
    bag.put("K44", c.k44a.eval(bag));
    cache.put("s68", "K44", bag.at("K44"));
    c.s62->solve(bag);
    bag.put("P44", c.p44b.eval(bag));
    cache.put("s62", "P44", bag.at("P44"));
    c.s63->solve(bag);
    bag.put("Q55", c.q55b.eval(bag));
    cache.put("s63", "Q55", bag.at("Q55"));
    c.s52->solve(bag);
    bag.put("V2h", c.tt49->x.eval(bag));
    cache.put("s52", "V2h", bag.at("V2h"));
    c.s56->solve(bag);
    bag.put("U2h", c.tt49->x2.eval(bag));
    cache.put("s56", "U2h", bag.at("U2h"));
    c.s57->solve(bag);
    bag.put("K2h", c.tt50->x.eval(bag));
    cache.put("s57", "K2h", bag.at("K2h"));
    c.s38->solve(bag);
    c.s39->solve(bag);
    c.s47->solve(bag);
    c.s48->solve(bag);

    std::map<std::string, QTensor> z;
    z["Z1"] = c.z1s.eval(bag).t;
    z["Z2"] = c.hat[0]->x2.eval(bag).t;
    z["Z3"] = c.hat[1]->x2.eval(bag).t;
    z["Z4"] = c.z4s.eval(bag).t;
    for (const auto& [k, v] : z) cache.put("assemble", k, NT(v));
    return z;
}

struct FullTensors {
    std::array<NT, 3> A, B, C, D, F, G, H, J, E;
    NT F4, G4, H4, J4, E4, E5;
};

FullTensors load_full(const SystemSpec& spec) {
    FullTensors t;
    for (int i = 0; i < 3; ++i) {
        const std::string s = std::to_string(i + 1);
        t.A[i] = NT(spec.at("A" + s));
        t.B[i] = NT(spec.at("B" + s));
        t.C[i] = NT(spec.at("C" + s));
        t.D[i] = NT(spec.at("D" + s));
        t.F[i] = NT(spec.at("F" + s));
        t.G[i] = NT(spec.at("G" + s));
        t.H[i] = NT(spec.at("H" + s));
        t.J[i] = NT(spec.at("J" + s));
        t.E[i] = NT(spec.at("E" + s));
    }
    t.F4 = NT(spec.at("F4"));
    t.G4 = NT(spec.at("G4"));
    t.H4 = NT(spec.at("H4"));
    t.J4 = NT(spec.at("J4"));
    t.E4 = NT(spec.at("E4"));
    t.E5 = NT(spec.at("E5"));
    return t;
}

// Outer conditions and the hat problems of the full system.
CascadeInput full_cascade_input(const FullTensors& t, CondSink& sink, CacheSink& cache,
                                const RankTolerance& rt) {
    CascadeInput in;
    in.full_numbering = true;
    for (int i = 0; i < 3; ++i) {
        const std::string s = std::to_string(i + 1);
        const SvdTriple sa = svd_triple(t.A[i], rt);
        const SvdTriple sb = svd_triple(t.B[i], rt);
        const SvdTriple sc = svd_triple(t.C[i], rt);
        const SvdTriple sd = svd_triple(t.D[i], rt);
        const NT M = sa.right * t.C[i];
        const NT N = t.D[i] * sb.left;
        const SvdTriple sm = svd_triple(M, rt);
        const SvdTriple sn = svd_triple(N, rt);
        cache.put("split", "M" + s, M);
        cache.put("split", "N" + s, N);
        cache.put("split", "S" + s, t.C[i] * sm.left);
        sink.add("3.3", "R_M" + s + " * R_A" + s + " * E" + s,
                 {&sm.right, &sa.right, &t.E[i]});
        sink.add("3.3", "E" + s + " * L_B" + s + " * L_N" + s,
                 {&t.E[i], &sb.left, &sn.left});
        sink.add("3.3", "R_C" + s + " * E" + s + " * L_B" + s,
                 {&sc.right, &t.E[i], &sb.left});

        CascadeInput::Hat h;
        h.C = M * t.F[i];
        h.D = t.G[i] * t.B[i] * sd.left;
        h.C2 = M * t.H[i];
        h.D2 = t.J[i] * t.B[i] * sd.left;
        h.E = sa.right * t.E[i] * sd.left;
        cache.put("split", "Ah" + s, h.C);
        cache.put("split", "Bh" + s, h.D);
        cache.put("split", "Ch" + s, h.C2);
        cache.put("split", "Dh" + s, h.D2);
        cache.put("split", "Eh" + s, h.E);
        in.hat[i] = std::move(h);
    }
    in.F4 = t.F4;
    in.G4 = t.G4;
    in.E4 = t.E4;
    in.H4 = t.H4;
    in.J4 = t.J4;
    in.E5 = t.E5;
    return in;
}

CascadeInput reduced_cascade_input(const SystemSpec& spec) {
    CascadeInput in;
    in.full_numbering = false;
    for (int i = 0; i < 3; ++i) {
        const std::string s = std::to_string(i + 1);
        CascadeInput::Hat h;
        h.C = NT(spec.at("F" + s));
        h.D = NT(spec.at("G" + s));
        h.C2 = NT(spec.at("H" + s));
        h.D2 = NT(spec.at("J" + s));
        h.E = NT(spec.at("E" + s));
        in.hat[i] = std::move(h);
    }
    in.F4 = NT(spec.at("F4"));
    in.G4 = NT(spec.at("G4"));
    in.E4 = NT(spec.at("E4"));
    in.H4 = NT(spec.at("H4"));
    in.J4 = NT(spec.at("J4"));
    in.E5 = NT(spec.at("E5"));
    return in;
}

void finish_solution(Solution& sol, ParamBag& bag) {
    sol.policy = bag.fp;
    sol.free_params_used = std::move(bag.drawn);
}

TwoTermFams plain_two_term(const NT& C, const NT& D, const NT& C2, const NT& D2,
                           const NT& E, const std::string& prefix,
                           const std::string& midname, CondSink& sink,
                           const std::string& id_ab, const std::string& id_cd,
                           const std::string& sym, const RankTolerance& rt,
                           DerivationCache* cachep, const std::string& stage) {
    CacheSink cache{cachep};
    return two_term_families(C, D, C2, D2, E, prefix, midname, sink, id_ab, id_cd, sym,
                             rt, cache, stage);
}

}  // namespace

const char* to_string(Variant v) {
    switch (v) {
        case Variant::single: return "single";
        case Variant::ax_yb: return "ax_yb";
        case Variant::two_term: return "two_term";
        case Variant::quad: return "quad";
        case Variant::full: return "full";
        case Variant::reduced: return "reduced";
        case Variant::eta: return "eta";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    for (Variant v : {Variant::single, Variant::ax_yb, Variant::two_term, Variant::quad,
                      Variant::full, Variant::reduced, Variant::eta})
        if (s == to_string(v)) return v;
    throw std::invalid_argument("unknown variant: " + s);
}

const QTensor& SystemSpec::at(const std::string& name) const {
    auto it = slots.find(name);
    if (it == slots.end())
        throw ShapeMismatch("spec (" + std::string(to_string(variant)) +
                            "): missing slot " + name);
    return it->second;
}

SolveResult solve_axb(const QTensor& a, const QTensor& b, const QTensor& e,
                      const FreeParams& fp, const ToleranceConfig& tol) {
    SolveResult out;
    const RankTolerance rt{tol.rank_rtol};
    CondSink sink{&out.report, tol.cond_rtol};
    const NT A(a), B(b), E(e);
    if (a.shape().rows != e.shape().rows || b.shape().cols != e.shape().cols ||
        a.shape().cols.size() == 0)
        throw ShapeMismatch("solve_axb: A/B do not conform with E");
    axb_conditions(sink, "single.a", "single.b", "eq", A, B, E, rt);
    if (!out.report.overall) return out;
    ParamBag bag{fp, tol, {}, {}};
    const Fam f = axb_family(A, B, E, "eq", rt);
    Solution sol;
    sol.unknowns["X"] = f.eval(bag).t;
    finish_solution(sol, bag);
    out.solution = std::move(sol);
    return out;
}

SolveResult solve_ax_yb(const QTensor& a, const QTensor& b, const QTensor& e,
                        const FreeParams& fp, const ToleranceConfig& tol) {
    SolveResult out;
    const RankTolerance rt{tol.rank_rtol};
    CondSink sink{&out.report, tol.cond_rtol};
    const NT A(a), B(b), E(e);
    const SvdTriple sa = svd_triple(A, rt);
    const SvdTriple sb = svd_triple(B, rt);
    sink.add("axyb.a", "R_A * E * L_B", {&sa.right, &E, &sb.left});
    if (!out.report.overall) return out;
    ParamBag bag{fp, tol, {}, {}};
    const NT& V1 = bag.free("V1", Shape(a.shape().cols, b.shape().rows));
    const NT& V2 = bag.free("V2", Shape(a.shape().cols, e.shape().cols));
    const NT& V3 = bag.free("V3", Shape(e.shape().rows, b.shape().rows));
    Solution sol;
    sol.unknowns["X"] = (sa.pinv * E - V1 * B + sa.left * V2).t;
    sol.unknowns["Y"] = (sa.right * E * sb.pinv + A * V1 + V3 * sb.right).t;
    finish_solution(sol, bag);
    out.solution = std::move(sol);
    return out;
}

SolveResult solve_two_term(const QTensor& c3, const QTensor& d3, const QTensor& c4,
                           const QTensor& d4, const QTensor& e, const FreeParams& fp,
                           const ToleranceConfig& tol) {
    SolveResult out;
    const RankTolerance rt{tol.rank_rtol};
    CondSink sink{&out.report, tol.cond_rtol};
    const NT C(c3), D(d3), C2(c4), D2(d4), E(e);
    const TwoTermFams fams = plain_two_term(C, D, C2, D2, E, "tt", "U2", sink,
                                            "two_term.ab", "two_term.cd", "tt", rt,
                                            &out.cache, "two_term");
    if (!out.report.overall) return out;
    ParamBag bag{fp, tol, {}, {}};
    Solution sol;
    sol.unknowns["X3"] = fams.x.eval(bag).t;
    sol.unknowns["X4"] = fams.x2.eval(bag).t;
    finish_solution(sol, bag);
    out.solution = std::move(sol);
    return out;
}

SolveResult solve_quad(const QTensor& a1, const QTensor& b1, const QTensor& a2,
                       const QTensor& b2, const QTensor& c3, const QTensor& d3,
                       const QTensor& c4, const QTensor& d4, const QTensor& e,
                       const FreeParams& fp, const ToleranceConfig& tol) {
    SolveResult out;
    const RankTolerance rt{tol.rank_rtol};
    CondSink sink{&out.report, tol.cond_rtol};
    CacheSink cache{&out.cache};
    const NT A1(a1), B1(b1), A2(a2), B2(b2), C3(c3), D3(d3), C4(c4), D4(d4), E(e);

    const SvdTriple sa1 = svd_triple(A1, rt);
    const SvdTriple sb1 = svd_triple(B1, rt);
    const SvdTriple sa2 = svd_triple(A2, rt);
    const SvdTriple sb2 = svd_triple(B2, rt);
    const NT M1 = sa1.right * A2;
    const NT N1 = B2 * sb1.left;
    const SvdTriple sm1 = svd_triple(M1, rt);
    const SvdTriple sn1 = svd_triple(N1, rt);
    cache.put("outer", "M1", M1);
    cache.put("outer", "N1", N1);
    cache.put("outer", "S1", A2 * sm1.left);
    sink.add("quad.o1", "R_M1 * R_A1 * E", {&sm1.right, &sa1.right, &E});
    sink.add("quad.o2", "E * L_B1 * L_N1", {&E, &sb1.left, &sn1.left});
    sink.add("quad.o3", "R_A2 * E * L_B1", {&sa2.right, &E, &sb1.left});

    const NT Ah = M1 * C3;
    const NT Bh = D3 * B1 * sb2.left;
    const NT Ch = M1 * C4;
    const NT Dh = D4 * B1 * sb2.left;
    const NT Eh = sa1.right * E * sb2.left;
    cache.put("inner", "Ah", Ah);
    cache.put("inner", "Bh", Bh);
    cache.put("inner", "Ch", Ch);
    cache.put("inner", "Dh", Dh);
    cache.put("inner", "Eh", Eh);
    const TwoTermFams inner = plain_two_term(Ah, Bh, Ch, Dh, Eh, "q.i", "Uh2", sink,
                                             "quad.i_ab", "quad.i_cd", "in", rt,
                                             &out.cache, "inner");
    if (!out.report.overall) return out;

    ParamBag bag{fp, tol, {}, {}};
    const NT X3 = inner.x.eval(bag);
    const NT X4 = inner.x2.eval(bag);
    const NT Edot = E - A2 * (C3 * X3 * D3 + C4 * X4 * D4) * B1;
    cache.put("outer", "Edot", Edot);
    CondSink quiet{nullptr, tol.cond_rtol};
    const TwoTermFams outer = plain_two_term(A1, B1, A2, B2, Edot, "q.o", "U2", quiet,
                                             "", "", "out", rt, &out.cache, "outer");
    Solution sol;
    sol.unknowns["X1"] = outer.x.eval(bag).t;
    sol.unknowns["X2"] = outer.x2.eval(bag).t;
    sol.unknowns["X3"] = X3.t;
    sol.unknowns["X4"] = X4.t;
    finish_solution(sol, bag);
    out.solution = std::move(sol);
    return out;
}

ConsistencyReport check_full(const SystemSpec& spec, const ToleranceConfig& tol) {
    spec.validate(tol);
    ConsistencyReport rep;
    CondSink sink{&rep, tol.cond_rtol};
    DerivationCache scratch;
    CacheSink cache{&scratch};
    const RankTolerance rt{tol.rank_rtol};
    const FullTensors t = load_full(spec);
    const CascadeInput in = full_cascade_input(t, sink, cache, rt);
    cascade_forward(in, sink, cache, rt);
    return rep;
}

SolveResult solve_full(const SystemSpec& spec, const FreeParams& fp,
                       const ToleranceConfig& tol) {
    spec.validate(tol);
    SolveResult out;
    CondSink sink{&out.report, tol.cond_rtol};
    CacheSink cache{&out.cache};
    const RankTolerance rt{tol.rank_rtol};
    const FullTensors t = load_full(spec);
    const CascadeInput in = full_cascade_input(t, sink, cache, rt);
    Cascade c = cascade_forward(in, sink, cache, rt);
    if (!out.report.overall) return out;

    ParamBag bag{fp, tol, {}, {}};
    auto z = cascade_backward(c, bag, cache);

    Solution sol;
    for (auto& [k, v] : z) sol.unknowns[k] = v;
    CondSink quiet{nullptr, tol.cond_rtol};
    for (int i = 0; i < 3; ++i) {
        const std::string s = std::to_string(i + 1);
        const NT Zi = NT(z["Z" + s]);
        const NT Zn = NT(z["Z" + std::to_string(i + 2)]);
        const NT Edot =
            t.E[i] - t.C[i] * (t.F[i] * Zi * t.G[i] + t.H[i] * Zn * t.J[i]) * t.B[i];
        cache.put("outer" + s, "Edot" + s, Edot);
        const TwoTermFams fams =
            plain_two_term(t.A[i], t.B[i], t.C[i], t.D[i], Edot, "o" + s, "U2" + s, quiet,
                           "", "", "o" + s, rt, &out.cache, "outer" + s);
        Fam fx = fams.x, fy = fams.x2;
        fx.lname = "U4" + s;
        fx.rname = "U5" + s;
        fx.mid->name = "U2" + s;
        fy.lname = "U1" + s;
        fy.rname = "U3" + s;
        fy.mid->name = "U2" + s;
        sol.unknowns["X" + s] = fx.eval(bag).t;
        sol.unknowns["Y" + s] = fy.eval(bag).t;
    }
    finish_solution(sol, bag);
    out.solution = std::move(sol);
    return out;
}

ConsistencyReport check_reduced(const SystemSpec& spec, const ToleranceConfig& tol) {
    spec.validate(tol);
    ConsistencyReport rep;
    CondSink sink{&rep, tol.cond_rtol};
    DerivationCache scratch;
    CacheSink cache{&scratch};
    const RankTolerance rt{tol.rank_rtol};
    const CascadeInput in = reduced_cascade_input(spec);
    cascade_forward(in, sink, cache, rt);
    return rep;
}

SolveResult solve_reduced(const SystemSpec& spec, const FreeParams& fp,
                          const ToleranceConfig& tol) {
    spec.validate(tol);
    SolveResult out;
    CondSink sink{&out.report, tol.cond_rtol};
    CacheSink cache{&out.cache};
    const RankTolerance rt{tol.rank_rtol};
    const CascadeInput in = reduced_cascade_input(spec);
    Cascade c = cascade_forward(in, sink, cache, rt);
    if (!out.report.overall) return out;
    ParamBag bag{fp, tol, {}, {}};
    auto z = cascade_backward(c, bag, cache);
    Solution sol;
    for (auto& [k, v] : z) sol.unknowns[k] = v;
    finish_solution(sol, bag);
    out.solution = std::move(sol);
    return out;
}

SolveResult solve_eta(const SystemSpec& spec, const FreeParams& fp,
                      const ToleranceConfig& tol) {
    spec.validate(tol);  // includes the eta-Hermitian right-hand-side check
    SystemSpec aux;
    aux.variant = Variant::reduced;
    for (int i = 1; i <= 4; ++i) {
        const std::string s = std::to_string(i);
        aux.slots.emplace("F" + s, spec.at("F" + s));
        aux.slots.emplace("H" + s, spec.at("H" + s));
        aux.slots.emplace("G" + s, eta_conj_transpose(spec.at("F" + s), spec.eta));
        aux.slots.emplace("J" + s, eta_conj_transpose(spec.at("H" + s), spec.eta));
    }
    for (int i = 1; i <= 5; ++i)
        aux.slots.emplace("E" + std::to_string(i), spec.at("E" + std::to_string(i)));
    SolveResult out = solve_reduced(aux, fp, tol);
    if (!out.solution) return out;
    Solution sym;
    sym.policy = out.solution->policy;
    sym.free_params_used = std::move(out.solution->free_params_used);
    for (const auto& [k, v] : out.solution->unknowns) {
        out.cache.put("average", k + "dot", v);
        sym.unknowns[k] = (v + eta_conj_transpose(v, spec.eta)).scaled(0.5);
    }
    out.solution = std::move(sym);
    return out;
}

ConsistencyReport check_system(const SystemSpec& spec, const ToleranceConfig& tol) {
    switch (spec.variant) {
        case Variant::full:
            return check_full(spec, tol);
        case Variant::reduced:
            return check_reduced(spec, tol);
        case Variant::eta: {
            spec.validate(tol);
            SystemSpec aux;
            aux.variant = Variant::reduced;
            for (int i = 1; i <= 4; ++i) {
                const std::string s = std::to_string(i);
                aux.slots.emplace("F" + s, spec.at("F" + s));
                aux.slots.emplace("H" + s, spec.at("H" + s));
                aux.slots.emplace("G" + s, eta_conj_transpose(spec.at("F" + s), spec.eta));
                aux.slots.emplace("J" + s, eta_conj_transpose(spec.at("H" + s), spec.eta));
            }
            for (int i = 1; i <= 5; ++i)
                aux.slots.emplace("E" + std::to_string(i),
                                  spec.at("E" + std::to_string(i)));
            return check_reduced(aux, tol);
        }
        default: {
            // the standalone variants: run the solve machinery, conditions only
            SolveResult r = solve_system(spec, FreeParams::zero(), tol);
            return r.report;
        }
    }
}

SolveResult solve_system(const SystemSpec& spec, const FreeParams& fp,
                         const ToleranceConfig& tol) {
    switch (spec.variant) {
        case Variant::single:
            return solve_axb(spec.at("A"), spec.at("B"), spec.at("E"), fp, tol);
        case Variant::ax_yb:
            return solve_ax_yb(spec.at("A"), spec.at("B"), spec.at("E"), fp, tol);
        case Variant::two_term:
            return solve_two_term(spec.at("C3"), spec.at("D3"), spec.at("C4"),
                                  spec.at("D4"), spec.at("E"), fp, tol);
        case Variant::quad:
            return solve_quad(spec.at("A1"), spec.at("B1"), spec.at("A2"), spec.at("B2"),
                              spec.at("C3"), spec.at("D3"), spec.at("C4"), spec.at("D4"),
                              spec.at("E"), fp, tol);
        case Variant::full:
            return solve_full(spec, fp, tol);
        case Variant::reduced:
            return solve_reduced(spec, fp, tol);
        case Variant::eta:
            return solve_eta(spec, fp, tol);
    }
    throw std::logic_error("solve_system: bad variant");
}

namespace {

struct Equation {
    std::string rhs_name;
    QTensor lhs;
};

std::vector<Equation> evaluate_equations(const SystemSpec& spec,
                                         const std::map<std::string, QTensor>& u) {
    std::vector<Equation> eqs;
    const auto& S = [&](const std::string& n) -> const QTensor& { return spec.at(n); };
    const auto& U = [&](const std::string& n) -> const QTensor& {
        auto it = u.find(n);
        if (it == u.end()) throw ShapeMismatch("solution: missing unknown " + n);
        return it->second;
    };
    auto prod3 = [](const QTensor& a, const QTensor& x, const QTensor& b) {
        return einstein_product(einstein_product(a, x), b);
    };
    switch (spec.variant) {
        case Variant::single:
            eqs.push_back({"E", prod3(S("A"), U("X"), S("B"))});
            break;
        case Variant::ax_yb:
            eqs.push_back({"E", einstein_product(S("A"), U("X")) +
                                    einstein_product(U("Y"), S("B"))});
            break;
        case Variant::two_term:
            eqs.push_back({"E", prod3(S("C3"), U("X3"), S("D3")) +
                                    prod3(S("C4"), U("X4"), S("D4"))});
            break;
        case Variant::quad: {
            QTensor inner = prod3(S("C3"), U("X3"), S("D3")) +
                            prod3(S("C4"), U("X4"), S("D4"));
            eqs.push_back({"E", prod3(S("A1"), U("X1"), S("B1")) +
                                    prod3(S("A2"), U("X2"), S("B2")) +
                                    prod3(S("A2"), inner, S("B1"))});
            break;
        }
        case Variant::full: {
            for (int i = 1; i <= 3; ++i) {
                const std::string s = std::to_string(i);
                QTensor inner =
                    prod3(S("F" + s), U("Z" + s), S("G" + s)) +
                    prod3(S("H" + s), U("Z" + std::to_string(i + 1)), S("J" + s));
                eqs.push_back({"E" + s, prod3(S("A" + s), U("X" + s), S("B" + s)) +
                                            prod3(S("C" + s), U("Y" + s), S("D" + s)) +
                                            prod3(S("C" + s), inner, S("B" + s))});
            }
            eqs.push_back({"E4", prod3(S("F4"), U("Z1"), S("G4"))});
            eqs.push_back({"E5", prod3(S("H4"), U("Z4"), S("J4"))});
            break;
        }
        case Variant::reduced: {
            for (int i = 1; i <= 3; ++i) {
                const std::string s = std::to_string(i);
                eqs.push_back(
                    {"E" + s,
                     prod3(S("F" + s), U("Z" + s), S("G" + s)) +
                         prod3(S("H" + s), U("Z" + std::to_string(i + 1)), S("J" + s))});
            }
            eqs.push_back({"E4", prod3(S("F4"), U("Z1"), S("G4"))});
            eqs.push_back({"E5", prod3(S("H4"), U("Z4"), S("J4"))});
            break;
        }
        case Variant::eta: {
            auto ect = [&](const std::string& n) {
                return eta_conj_transpose(S(n), spec.eta);
            };
            for (int i = 1; i <= 3; ++i) {
                const std::string s = std::to_string(i);
                eqs.push_back(
                    {"E" + s,
                     prod3(S("F" + s), U("Z" + s), ect("F" + s)) +
                         prod3(S("H" + s), U("Z" + std::to_string(i + 1)), ect("H" + s))});
            }
            eqs.push_back({"E4", prod3(S("F4"), U("Z1"), ect("F4"))});
            eqs.push_back({"E5", prod3(S("H4"), U("Z4"), ect("H4"))});
            break;
        }
    }
    return eqs;
}

}  // namespace

std::vector<std::string> SystemSpec::unknown_names() const {
    switch (variant) {
        case Variant::single: return {"X"};
        case Variant::ax_yb: return {"X", "Y"};
        case Variant::two_term: return {"X3", "X4"};
        case Variant::quad: return {"X1", "X2", "X3", "X4"};
        case Variant::full:
            return {"X1", "X2", "X3", "Y1", "Y2", "Y3", "Z1", "Z2", "Z3", "Z4"};
        case Variant::reduced:
        case Variant::eta: return {"Z1", "Z2", "Z3", "Z4"};
    }
    return {};
}

std::vector<std::string> SystemSpec::rhs_names() const {
    switch (variant) {
        case Variant::single:
        case Variant::ax_yb:
        case Variant::two_term:
        case Variant::quad: return {"E"};
        default: return {"E1", "E2", "E3", "E4", "E5"};
    }
}

namespace {

Shape derived_unknown_shape(const SystemSpec& spec, const std::string& name) {
    const auto& S = [&](const std::string& n) -> const QTensor& { return spec.at(n); };
    auto lr = [](const QTensor& a, const QTensor& b) {
        return Shape(a.shape().cols, b.shape().rows);
    };
    switch (spec.variant) {
        case Variant::single: return lr(S("A"), S("B"));
        case Variant::ax_yb:
            if (name == "X") return Shape(S("A").shape().cols, S("E").shape().cols);
            return Shape(S("E").shape().rows, S("B").shape().rows);
        case Variant::two_term:
            return name == "X3" ? lr(S("C3"), S("D3")) : lr(S("C4"), S("D4"));
        case Variant::quad:
            if (name == "X1") return lr(S("A1"), S("B1"));
            if (name == "X2") return lr(S("A2"), S("B2"));
            if (name == "X3") return lr(S("C3"), S("D3"));
            return lr(S("C4"), S("D4"));
        case Variant::full:
        case Variant::reduced:
            if (name == "Z1") return lr(S("F4"), S("G4"));
            if (name == "Z4") return lr(S("H4"), S("J4"));
            if (name == "Z2") return lr(S("H1"), S("J1"));
            if (name == "Z3") return lr(S("H2"), S("J2"));
            if (name[0] == 'X') {
                const std::string s(1, name[1]);
                return lr(S("A" + s), S("B" + s));
            }
            {
                const std::string s(1, name[1]);
                return lr(S("C" + s), S("D" + s));
            }
        case Variant::eta: {
            const QTensor& c = name == "Z1"   ? S("F4")
                               : name == "Z2" ? S("H1")
                               : name == "Z3" ? S("H2")
                                              : S("H4");
            return Shape(c.shape().cols, c.shape().cols);
        }
    }
    throw std::logic_error("derived_unknown_shape");
}

}  // namespace

void SystemSpec::validate(const ToleranceConfig& tol) const {
    std::map<std::string, QTensor> dummies;
    for (const auto& n : unknown_names())
        dummies.emplace(n, QTensor::zeros(derived_unknown_shape(*this, n)));
    const auto eqs = evaluate_equations(*this, dummies);
    for (const auto& eq : eqs) {
        const QTensor& rhs = at(eq.rhs_name);
        if (eq.lhs.shape() != rhs.shape())
            throw ShapeMismatch("spec: equation for " + eq.rhs_name + " produces " +
                                eq.lhs.shape().str() + " but the right-hand side is " +
                                rhs.shape().str());
    }
    if (variant == Variant::eta) {
        for (const auto& n : rhs_names()) {
            const QTensor& e = at(n);
            const double dev = (e - eta_conj_transpose(e, eta)).fro_norm();
            if (dev > std::max(tol.cond_rtol, 1e-9) * std::max(1.0, e.fro_norm()))
                throw NotEtaHermitianRHS("spec: " + n +
                                         " is not eta-Hermitian (deviation " +
                                         std::to_string(dev) + ")");
        }
    }
}

ConsistencyReport verify(const SystemSpec& spec, const Solution& sol,
                         const ToleranceConfig& tol) {
    ConsistencyReport rep;
    const auto eqs = evaluate_equations(spec, sol.unknowns);
    for (const auto& eq : eqs) {
        const QTensor& rhs = spec.at(eq.rhs_name);
        if (eq.lhs.shape() != rhs.shape())
            throw ShapeMismatch("verify: equation for " + eq.rhs_name + " shape mismatch");
        ConditionResult c;
        c.id = eq.rhs_name;
        c.term = "|LHS - " + eq.rhs_name + "| / max(1, |" + eq.rhs_name + "|)";
        c.residual = (eq.lhs - rhs).fro_norm() / std::max(1.0, rhs.fro_norm());
        c.threshold = tol.cond_rtol;
        c.pass = c.residual <= c.threshold;
        rep.add(std::move(c));
    }
    return rep;
}

}  // namespace quatsylv
