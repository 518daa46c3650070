#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "helpers.hpp"
#include "tradespace/ingest.hpp"
#include "tradespace/productspace.hpp"
#include "tradespace/reference.hpp"

using namespace tradespace;
using testutil::random_binary;

namespace {

// c1={p1,p2}, c2={p2,p3}, c3={p1,p2,p3} -- the worked fixture used across modules
Eigen::MatrixXd worked_fixture() {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, 3);
    M(0, 0) = M(0, 1) = 1;
    M(1, 1) = M(1, 2) = 1;
    M(2, 0) = M(2, 1) = M(2, 2) = 1;
    return M;
}

}  // namespace

TEST_CASE("proximity of the worked fixture") {
    Eigen::MatrixXd phi = proximity(worked_fixture());
    CHECK(phi(0, 1) == 2.0 / 3.0);
    CHECK(phi(1, 2) == 2.0 / 3.0);
    CHECK(phi(0, 2) == 1.0 / 2.0);
    CHECK(phi(0, 0) == 0.0);  // zero diagonal by convention
    CHECK((phi - phi.transpose().eval()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical advantage columns give proximity one, disjoint give zero") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 3);
    M(0, 0) = M(0, 1) = 1;
    M(1, 0) = M(1, 1) = 1;
    M(2, 2) = 1;
    M(3, 2) = 1;
    Eigen::MatrixXd phi = proximity(M);
    CHECK(phi(0, 1) == 1.0);
    CHECK(phi(0, 2) == 0.0);
}

TEST_CASE("min-conditional proximity of the worked fixture") {
    Eigen::MatrixXd phi = proximity_min_conditional(worked_fixture());
    CHECK(phi(0, 1) == 2.0 / 3.0);  // min(2/3, 2/2)
    CHECK(phi(0, 2) == 1.0 / 2.0);
}

TEST_CASE("both proximity routes coincide entrywise on random binary matrices") {
    std::mt19937_64 gen(31);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd M = random_binary(gen, 4 + static_cast<int>(draw_below(gen, 12)),
                                          3 + static_cast<int>(draw_below(gen, 15)), 0.35);
        Eigen::MatrixXd a = proximity(M);
        Eigen::MatrixXd b = proximity_min_conditional(M);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        // and both agree with their serial references
        CHECK((a - reference::proximity(M)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((b - reference::min_conditional_proximity(M)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("proximity reaches one exactly for identical advantage columns") {
    std::mt19937_64 gen(29);
    for (int rep = 0; rep < 15; ++rep) {
        Eigen::MatrixXd M = random_binary(gen, 8, 7, 0.45);
        Eigen::MatrixXd phi = proximity(M);
        for (int p = 0; p < 7; ++p)
            for (int q = p + 1; q < 7; ++q) {
                const bool identical = (M.col(p) - M.col(q)).cwiseAbs().maxCoeff() == 0.0;
                const bool nonzero = M.col(p).sum() > 0.0;
                if (identical && nonzero) CHECK(phi(p, q) == 1.0);
                if (phi(p, q) == 1.0) CHECK((identical && nonzero));
            }
    }
}

TEST_CASE("permuting countries leaves proximity unchanged, permuting products permutes it") {
    std::mt19937_64 gen(37);
    Eigen::MatrixXd M = random_binary(gen, 10, 8, 0.4);
    Eigen::MatrixXd phi = proximity(M);

    // reverse the country rows
    Eigen::MatrixXd Mrev = M.colwise().reverse().eval();
    CHECK((proximity(Mrev) - phi).cwiseAbs().maxCoeff() == 0.0);

    // swap two product columns
    Eigen::MatrixXd Mswap = M;
    Mswap.col(2).swap(Mswap.col(5));
    Eigen::MatrixXd phi_swap = proximity(Mswap);
    Eigen::MatrixXd expected = phi;
    expected.col(2).swap(expected.col(5));
    expected.row(2).swap(expected.row(5));
    CHECK((phi_swap - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("products with identical columns share the same complexity") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 3);
    // p1 and p2 identical, p3 held only by the first country
    M(0, 0) = M(0, 1) = M(0, 2) = 1;
    M(1, 0) = M(1, 1) = 1;
    M(2, 0) = M(2, 1) = 1;
    M(3, 0) = M(3, 1) = 1;
    PciResult r = pci(M);
    CHECK(r.pci(0) == doctest::Approx(r.pci(1)).epsilon(1e-9));
}

TEST_CASE("identity matrix yields equal complexity for every product") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(5, 5);
    PciResult r = pci(M);
    for (int p = 1; p < 5; ++p) {
        CHECK(r.pci(p) == r.pci(0));
        CHECK(r.pci_norm(p) == r.pci_norm(0));
    }
}

TEST_CASE("nested 4x4 matrix orders complexity against ubiquity") {
    // triangular structure: the most capable country exports everything
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 4);
    for (int c = 0; c < 4; ++c)
        for (int p = 0; p <= c; ++p) M(c, p) = 1.0;
    // ubiquity: p0=4, p1=3, p2=2, p3=1
    PciResult r = pci(M);
    CHECK(r.pci(0) < r.pci(1));
    CHECK(r.pci(1) < r.pci(2));
    CHECK(r.pci(2) < r.pci(3));

    // brute-force oracle: full eigen decomposition of the symmetrized
    // transition matrix, second-largest eigenvalue's eigenvector
    std::vector<double> ubiq = {4, 3, 2, 1};
    std::vector<double> divers = {1, 2, 3, 4};
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double sum = 0.0;
            for (int c = 0; c < 4; ++c)
                if (M(c, a) > 0.5 && M(c, b) > 0.5) sum += 1.0 / divers[static_cast<size_t>(c)];
            S(a, b) = sum / std::sqrt(ubiq[static_cast<size_t>(a)] * ubiq[static_cast<size_t>(b)]);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    // eigenvalues ascending: second-largest is index 2
    Eigen::VectorXd u2 = solver.eigenvectors().col(2);
    Eigen::VectorXd oracle(4);
    for (int a = 0; a < 4; ++a) oracle(a) = u2(a) / std::sqrt(ubiq[static_cast<size_t>(a)]);
    // standardize and orient like the implementation
    oracle.array() -= oracle.mean();
    double sd = std::sqrt(oracle.squaredNorm() / 4.0);
    oracle /= sd;
    if (oracle(3) < oracle(0)) oracle = -oracle;
    for (int p = 0; p < 4; ++p) CHECK(r.pci(p) == doctest::Approx(oracle(p)).epsilon(1e-8));
    CHECK(r.eigenvalue == doctest::Approx(solver.eigenvalues()(2)).epsilon(1e-8));
}

TEST_CASE("complexity is invariant under duplicating the country sample") {
    std::mt19937_64 gen(41);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd M = random_binary(gen, 8, 6, 0.5);
        // keep every product exported somewhere so the core block is stable
        for (int p = 0; p < 6; ++p)
            if (M.col(p).sum() == 0.0) M(0, p) = 1.0;
        Eigen::MatrixXd doubled(16, 6);
        doubled << M, M;
        PciResult a = pci(M);
        PciResult b = pci(doubled);
        for (int p = 0; p < 6; ++p) {
            if (!a.in_core[static_cast<size_t>(p)]) continue;
            CHECK(a.pci(p) == doctest::Approx(b.pci(p)).epsilon(1e-7));
        }
    }
}

TEST_CASE("disconnected blocks: largest is scored, the rest is flagged") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 5);
    // block one: p0,p1,p2 shared by three countries; block two: p3,p4
    M(0, 0) = M(0, 1) = 1;
    M(1, 1) = M(1, 2) = 1;
    M(2, 0) = M(2, 2) = 1;
    M(3, 3) = M(3, 4) = 1;
    M(4, 3) = 1;
    PciResult r = pci(M);
    CHECK(r.in_core[0]);
    CHECK(r.in_core[1]);
    CHECK(r.in_core[2]);
    CHECK(!r.in_core[3]);
    CHECK(!r.in_core[4]);
    CHECK(std::isnan(r.pci(3)));
    CHECK(r.pci_norm(3) == 0.0);
    // min-max lands on [0, 1] inside the block
    CHECK(r.pci_norm.maxCoeff() == 1.0);
    CHECK(r.pci_norm.minCoeff() == 0.0);
}

TEST_CASE("build_layers assembles node metadata and the interlayer map") {
    // industry set over 3 products, firm set over 2 components
    SpecializationSet industry;
    industry.year = 2022;
    industry.locations = Axis({"AAA", "BBB", "CCC"});
    industry.products = Axis({"850110", "850120", "870810"});
    industry.M = worked_fixture();
    industry.R = industry.M;
    industry.srca = Eigen::MatrixXd::Zero(3, 3);
    industry.row_defined = {1, 1, 1};
    industry.col_defined = {1, 1, 1};

    SpecializationSet firm;
    firm.scope = Scope::firm();
    firm.locations = Axis({"f1", "f2"});
    firm.products = Axis({"battery_pack", "piston"});
    firm.M = Eigen::MatrixXd::Ones(2, 2);
    firm.R = firm.M;
    firm.srca = Eigen::MatrixXd::Zero(2, 2);
    firm.row_defined = {1, 1};
    firm.col_defined = {1, 1};

    ComponentTaxonomy tax;
    tax.components.push_back({"battery_pack", "powertrain", "battery", "battery_pack", PowertrainClass::EV,
                              {"850110", "850120"}});
    tax.components.push_back({"piston", "powertrain", "engine", "piston", PowertrainClass::ICE, {"870810"}});
    tax.by_id = {{"battery_pack", 0}, {"piston", 1}};

    HsClassMap class_map = classify_hs_codes(tax);
    LayerBuild layers = build_layers(industry, firm, tax, class_map);

    CHECK(layers.industry.nodes.size() == 3);  // node count equals retained products
    CHECK(layers.firm.nodes.size() == 2);
    CHECK(layers.interlayer.total_links() == 3);  // equals the taxonomy hs6_links total
    CHECK(layers.industry.nodes[0].chapter == "85");
    REQUIRE(layers.industry.nodes[0].cls.has_value());
    CHECK(*layers.industry.nodes[0].cls == PowertrainClass::EV);
    REQUIRE(layers.firm.nodes[1].cls.has_value());
    CHECK(*layers.firm.nodes[1].cls == PowertrainClass::ICE);
}
