#include <cmath>
#include <limits>

#include <doctest.h>

#include "kefdr/errors.hpp"
#include "kefdr/procedures.hpp"
#include "kefdr/rng.hpp"
#include "test_helpers.hpp"

using namespace kefdr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PairedEvidence fake_evidence(Vector p1, Vector p2) {
    PairedEvidence ev;
    ev.m = static_cast<int>(p1.size());
    ev.p1 = std::move(p1);
    ev.p2 = std::move(p2);
    ev.t1.assign(ev.m, 0.0);
    ev.t2.assign(ev.m, 0.0);
    ev.beta1.assign(ev.m, 0.0);
    ev.beta2.assign(ev.m, 0.0);
    ev.sigma_hat = 1.0;
    ev.nu = 100;
    return ev;
}

PairedEvidence random_evidence(int m, Rng& rng) {
    Vector p1(m), p2(m);
    for (int j = 0; j < m; ++j) {
        // mix of signal-like and null-like p-values on both tracks
        p1[j] = rng.uniform() < 0.35 ? 0.05 * rng.uniform() : rng.uniform();
        p2[j] = rng.uniform() < 0.35 ? 0.02 * rng.uniform() : rng.uniform();
    }
    return fake_evidence(std::move(p1), std::move(p2));
}

} // namespace

TEST_CASE("bh worked examples") {
    DecisionReport r = bh(Vector{0.01, 0.02, 0.5, 0.9}, 0.1);
    CHECK(r.rejected == std::vector<int>{0, 1});

    CHECK(bh(Vector{1.0, 1.0, 1.0}, 0.2).rejected.empty());

    DecisionReport all = bh(Vector(5, 0.0), 0.05);
    CHECK(all.rejected.size() == 5);
}

TEST_CASE("bh input validation") {
    CHECK_THROWS_AS(bh(Vector{}, 0.1), EmptyInput);
    CHECK_THROWS_AS(bh(Vector{0.5}, 0.0), BadTuning);
    CHECK_THROWS_AS(bh(Vector{std::numeric_limits<double>::quiet_NaN()}, 0.1), DomainError);
    CHECK_THROWS_AS(bh(Vector{-0.1}, 0.1), DomainError);
}

TEST_CASE("bh equals the brute-force step-up scan (with infinities)") {
    Rng rng(71);
    for (int trial = 0; trial < 2000; ++trial) {
        const int m = 1 + rng.below(8);
        Vector p(m);
        for (int j = 0; j < m; ++j) {
            const double u = rng.uniform();
            if (u < 0.1)
                p[j] = kInf;
            else if (u < 0.2)
                p[j] = 0.0;
            else
                p[j] = rng.uniform() * (rng.uniform() < 0.5 ? 0.2 : 1.0);
        }
        const double alpha = 0.02 + 0.5 * rng.uniform();
        CHECK(bh(p, alpha).rejected == testutil::bh_bruteforce(p, alpha));
    }
}

TEST_CASE("bh is monotone in each entry") {
    Rng rng(72);
    for (int trial = 0; trial < 500; ++trial) {
        const int m = 2 + rng.below(7);
        Vector p(m);
        for (int j = 0; j < m; ++j) p[j] = rng.uniform();
        const double alpha = 0.05 + 0.3 * rng.uniform();
        std::vector<int> before = bh(p, alpha).rejected;
        Vector q = p;
        const int pick = rng.below(m);
        q[pick] *= rng.uniform();
        std::vector<int> after = bh(q, alpha).rejected;
        CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
    }
}

TEST_CASE("storey estimator worked examples") {
    CHECK(storey_pi0(Vector{0.9, 0.8, 0.01, 0.02}, 0.5) == doctest::Approx(1.5));
    // empty exceedance
    CHECK(storey_pi0(Vector{0.1, 0.2, 0.3, 0.4}, 0.5) == doctest::Approx(1.0 / (4.0 * 0.5)));
    // full exceedance
    CHECK(storey_pi0(Vector{0.9, 0.8, 0.7, 0.6}, 0.5) == doctest::Approx(5.0 / (4.0 * 0.5)));
    CHECK_THROWS_AS(storey_pi0(Vector{0.5}, 1.0), BadTuning);
}

TEST_CASE("bon_bh screening") {
    // everything screened out
    PairedEvidence ev = fake_evidence(Vector{0.9, 0.5, 0.4}, Vector{0.0, 0.0, 0.0});
    CHECK(bon_bh(ev, 0.05).rejected.empty());

    // screen passes everything -> plain BH at sqrt(alpha) on p2
    Rng rng(73);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 3 + rng.below(6);
        Vector p2(m);
        for (double& v : p2) v = rng.uniform();
        PairedEvidence open = fake_evidence(Vector(m, 0.0), p2);
        const double alpha = 0.05;
        CHECK(bon_bh(open, alpha).rejected == bh(p2, std::sqrt(alpha)).rejected);
    }
}

TEST_CASE("adaptive_bon_bh composition and reductions") {
    const double alpha = 0.05;
    // all screened out and all track-2 exceed lambda
    PairedEvidence ev = fake_evidence(Vector{0.9, 0.8, 0.7, 0.9}, Vector{0.9, 0.8, 0.9, 0.7});
    CHECK(adaptive_bon_bh(ev, alpha, 0.5).rejected.empty());

    // pi0 composed from the track-2 estimator scales the screened entries
    PairedEvidence ev2 =
        fake_evidence(Vector{0.0, 0.0, 0.0, 0.0}, Vector{0.9, 0.8, 0.01, 0.02});
    DecisionReport rep = adaptive_bon_bh(ev2, alpha, 0.5);
    CHECK(rep.null_prop.value() == doctest::Approx(1.5));
    CHECK(rep.adjusted[2] == doctest::Approx(1.5 * 0.01));
    CHECK(rep.adjusted[0] == doctest::Approx(1.5 * 0.9));

    // forced pi0 = 1 with open screen reduces to BH at sqrt(alpha)
    DecisionReport forced = adaptive_bon_bh(ev2, alpha, 0.5, 1.0);
    CHECK(forced.rejected == bh(ev2.p2, std::sqrt(alpha)).rejected);

    CHECK_THROWS_AS(adaptive_bon_bh(ev2, alpha, 0.2), BadTuning);  // lambda <= sqrt(alpha)
}

TEST_CASE("ep-BH variant worked example and unweighted reduction") {
    // S = (2, 0.5, 0) realized by the bounded calibrator with C = 2 at
    // p1 = (0, 0.75, 1): g(t) = 2(1 - t)
    PairedEvidence ev = fake_evidence(Vector{0.0, 0.75, 1.0}, Vector{0.004, 0.2, 0.9});
    DecisionReport rep = calibrated_ep_bh(ev, Calibrator::bounded_poly(2.0), 0.05);
    CHECK(rep.adjusted[0] == doctest::Approx(0.002));
    CHECK(rep.adjusted[1] == doctest::Approx(0.4));
    CHECK(std::isinf(rep.adjusted[2]));
    CHECK(rep.rejected == std::vector<int>{0});

    // constant calibrator: identical to BH on the second track
    Rng rng(74);
    for (int trial = 0; trial < 50; ++trial) {
        PairedEvidence r = random_evidence(3 + rng.below(8), rng);
        CHECK(calibrated_ep_bh(r, Calibrator::constant(1.0), 0.1).rejected ==
              bh(r.p2, 0.1).rejected);
    }
}

TEST_CASE("all-or-nothing calibrator reproduces the screening procedure") {
    Rng rng(75);
    const Calibrator g1 = Calibrator::all_or_nothing(0.5);
    for (double alpha : {0.05, 0.1}) {
        for (int trial = 0; trial < 200; ++trial) {
            PairedEvidence ev = random_evidence(2 + rng.below(30), rng);
            CHECK(calibrated_ep_bh(ev, g1, alpha).rejected == bon_bh(ev, alpha).rejected);
        }
    }
}

TEST_CASE("adaptive ep-BH worked example and reductions") {
    const double alpha = 0.05, lambda = 0.5;
    // S = 4 everywhere via the bounded calibrator with C = 4 at p1 = 0
    PairedEvidence ev =
        fake_evidence(Vector(4, 0.0), Vector{0.01, 0.02, 0.6, 0.9});
    DecisionReport rep = calibrated_ep_storey(ev, Calibrator::bounded_poly(4.0), alpha, lambda);
    CHECK(rep.null_prop.value() == doctest::Approx(1.5));
    CHECK(rep.adjusted[0] == doctest::Approx(0.00375));
    CHECK(rep.adjusted[1] == doctest::Approx(0.0075));
    CHECK(std::isinf(rep.adjusted[2]));
    CHECK(std::isinf(rep.adjusted[3]));
    CHECK(rep.rejected == std::vector<int>{0, 1});

    // everything above lambda is never rejectable
    PairedEvidence high = fake_evidence(Vector(3, 0.0), Vector{0.6, 0.7, 0.8});
    CHECK(calibrated_ep_storey(high, Calibrator::bounded_poly(4.0), alpha, lambda)
              .rejected.empty());

    // forced pi0 = 1 with all p2 <= lambda reduces to the non-adaptive variant
    Rng rng(76);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 3 + rng.below(8);
        Vector p1(m), p2(m);
        for (int j = 0; j < m; ++j) {
            p1[j] = rng.uniform();
            p2[j] = lambda * rng.uniform();
        }
        PairedEvidence e = fake_evidence(p1, p2);
        const Calibrator cal = Calibrator::bounded_poly_at_level();
        CHECK(calibrated_ep_storey(e, cal, alpha, lambda, 1.0).rejected ==
              calibrated_ep_bh(e, cal, alpha).rejected);
    }
}

TEST_CASE("adaptive ep-BH matches adaptive screening when track 2 is below lambda") {
    Rng rng(77);
    const Calibrator g1 = Calibrator::all_or_nothing(0.5);
    const double lambda = 0.5;
    for (double alpha : {0.05, 0.1}) {
        for (int trial = 0; trial < 200; ++trial) {
            const int m = 2 + rng.below(30);
            Vector p1(m), p2(m);
            for (int j = 0; j < m; ++j) {
                p1[j] = rng.uniform() < 0.4 ? 0.05 * rng.uniform() : rng.uniform();
                p2[j] = lambda * rng.uniform();  // conditioning event
            }
            PairedEvidence ev = fake_evidence(p1, p2);
            CHECK(calibrated_ep_storey(ev, g1, alpha, lambda).rejected ==
                  adaptive_bon_bh(ev, alpha, lambda).rejected);
        }
    }
}

TEST_CASE("unconditional adaptive equivalence fails on exceedances and is reported") {
    // The indicator on track-2 p-values has no counterpart in the adaptive
    // screening procedure, so instances with p2 > lambda may diverge. The
    // conditional form is asserted elsewhere; here the divergences are
    // counted and surfaced without failing.
    Rng rng(81);
    const Calibrator g1 = Calibrator::all_or_nothing(0.5);
    const double alpha = 0.1, lambda = 0.5;
    int divergent = 0;
    const int trials = 2000;
    for (int trial = 0; trial < trials; ++trial) {
        PairedEvidence ev = random_evidence(2 + rng.below(30), rng);
        if (calibrated_ep_storey(ev, g1, alpha, lambda).rejected !=
            adaptive_bon_bh(ev, alpha, lambda).rejected)
            ++divergent;
    }
    WARN_MESSAGE(divergent == 0, "unconditional variant diverged on ", divergent, " of ",
                 trials, " instances (expected: equivalence is conditional)");
    CHECK(divergent < trials);
}

TEST_CASE("weighted BH worked example") {
    // S = (3, 1) realized by the bounded calibrator with C = 3 at p1 = (0, 4/9)
    PairedEvidence ev = fake_evidence(Vector{0.0, 4.0 / 9.0}, Vector{0.02, 0.8});
    DecisionReport rep =
        calibrated_weighted_bh(ev, Calibrator::bounded_poly(3.0), 0.1, 0.5);
    CHECK(rep.null_prop.value() == doctest::Approx(2.0));
    CHECK(rep.adjusted[0] == doctest::Approx(2.0 * 0.02 / 1.5));
    CHECK(rep.adjusted[1] == doctest::Approx(2.0 * 0.8 / 0.5));
    CHECK(rep.rejected == std::vector<int>{0});
}

TEST_CASE("weighted BH with constant weights reduces to scaled BH") {
    Rng rng(78);
    const double lambda = 0.5, alpha = 0.2;
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 4 + rng.below(6);
        Vector p1(m), p2(m);
        for (int j = 0; j < m; ++j) {
            p1[j] = rng.uniform();
            p2[j] = lambda * rng.uniform();
        }
        PairedEvidence ev = fake_evidence(p1, p2);
        DecisionReport rep =
            calibrated_weighted_bh(ev, Calibrator::constant(1.0), alpha, lambda);
        const double delta0 = 1.0 / (m * (1.0 - lambda));
        CHECK(rep.null_prop.value() == doctest::Approx(delta0));
        // cap delta0*lambda = lambda^2/(m(1-lambda)) exceeds alpha here, so the
        // decision is plain BH on delta0 * p2
        Vector scaled(m);
        for (int j = 0; j < m; ++j) scaled[j] = delta0 * p2[j];
        CHECK(rep.rejected == bh(scaled, alpha).rejected);
    }
}

TEST_CASE("weighted BH cap can veto rejections") {
    // W = (1.9, 0.1) via C = 20 and p1 = (0, (18/19)^19)
    const double p1_second = std::pow(18.0 / 19.0, 19.0);
    PairedEvidence ev = fake_evidence(Vector{0.0, p1_second}, Vector{0.12, 0.8});
    const double alpha = 0.3, lambda = 0.05;
    DecisionReport rep =
        calibrated_weighted_bh(ev, Calibrator::bounded_poly(20.0), alpha, lambda);
    // both track-2 p-values exceed lambda: delta0 = (1.9 + 2.0)/(2 * 0.95)
    const double delta0 = 3.9 / 1.9;
    CHECK(rep.null_prop.value() == doctest::Approx(delta0));
    // cap delta0*lambda ~ 0.1026 undercuts every step-up threshold
    CHECK(rep.adjusted[0] == doctest::Approx(delta0 * 0.12 / 1.9));
    CHECK(rep.adjusted[0] > delta0 * lambda);
    CHECK(rep.rejected.empty());
    // without the cap the smallest adjusted value would be rejected
    CHECK(bh(rep.adjusted, alpha).rejected == std::vector<int>{0});
}

TEST_CASE("weighted BH falls back to uniform weights on zero evidence") {
    PairedEvidence ev = fake_evidence(Vector{1.0, 1.0, 1.0}, Vector{0.001, 0.2, 0.4});
    DecisionReport rep =
        calibrated_weighted_bh(ev, Calibrator::bounded_poly(20.0), 0.1, 0.5);
    REQUIRE(rep.fallback_flags.size() == 1);
    CHECK(rep.fallback_flags[0] == "zero_evidence_uniform_weights");
    CHECK(rep.null_prop.value() == doctest::Approx(1.0 / (3.0 * 0.5)));
}

TEST_CASE("weighted BH handles infinite e-values with a degenerate weight vector") {
    PairedEvidence ev = fake_evidence(Vector{0.0, 0.5, 0.9}, Vector{0.01, 0.2, 0.4});
    DecisionReport rep = calibrated_weighted_bh(ev, Calibrator::power(0.3), 0.1, 0.5);
    REQUIRE_FALSE(rep.fallback_flags.empty());
    CHECK(rep.fallback_flags[0] == "infinite_evalue_degenerate_weights");
    CHECK(std::isinf(rep.adjusted[1]));
    CHECK(std::isinf(rep.adjusted[2]));
}

TEST_CASE("generic ep_bh conventions") {
    CHECK(ep_bh(Vector{0.01, 0.2, 0.9}, Vector(3, 1.0), 0.1).rejected ==
          bh(Vector{0.01, 0.2, 0.9}, 0.1).rejected);

    DecisionReport inf_rep = ep_bh(Vector{0.9, 0.01}, Vector{kInf, 1.0}, 0.1);
    CHECK(inf_rep.adjusted[0] == 0.0);
    CHECK(std::binary_search(inf_rep.rejected.begin(), inf_rep.rejected.end(), 0));

    DecisionReport zero_rep = ep_bh(Vector{0.0, 0.5}, Vector{0.0, 1.0}, 0.1);
    CHECK(std::isinf(zero_rep.adjusted[0]));
}

TEST_CASE("generic ep_bh equals exhaustive scan on small instances") {
    Rng rng(79);
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = 1 + rng.below(6);
        Vector p(m), e(m);
        for (int j = 0; j < m; ++j) {
            p[j] = rng.uniform();
            const double u = rng.uniform();
            e[j] = u < 0.15 ? 0.0 : (u < 0.25 ? kInf : 4.0 * rng.uniform());
        }
        const double alpha = 0.02 + 0.4 * rng.uniform();
        Vector adj(m);
        for (int j = 0; j < m; ++j)
            adj[j] = e[j] <= 0.0 ? kInf : (std::isinf(e[j]) ? 0.0 : p[j] / e[j]);
        CHECK(ep_bh(p, e, alpha).rejected == testutil::bh_bruteforce(adj, alpha));
    }
}

TEST_CASE("scaling all e-values matches scaling the level") {
    Rng rng(80);
    for (int trial = 0; trial < 300; ++trial) {
        const int m = 2 + rng.below(8);
        Vector p(m), e(m);
        for (int j = 0; j < m; ++j) {
            p[j] = rng.uniform();
            e[j] = 0.1 + 4.0 * rng.uniform();
        }
        const double alpha = 0.05 + 0.3 * rng.uniform();
        const double c = 0.2 + 2.0 * rng.uniform();
        if (c * alpha >= 1.0) continue;
        Vector ce(m), ratio(m);
        for (int j = 0; j < m; ++j) {
            ce[j] = c * e[j];
            ratio[j] = p[j] / e[j];
        }
        CHECK(ep_bh(p, ce, alpha).rejected == bh(ratio, c * alpha).rejected);
    }
}

TEST_CASE("report serialization round trip") {
    DecisionReport rep = bh(Vector{0.01, 0.5}, 0.1);
    const std::string json = report_summary_json(rep);
    CHECK(json.find("\"procedure\":\"bh\"") != std::string::npos);
    CHECK(json.find("\"n_rejected\":1") != std::string::npos);
}
