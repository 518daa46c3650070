// Benchmark comparing the parallel kernels against the serial reference
// implementations on synthetic data of configurable size.

#include <chrono>
#include <cstdio>
#include <random>

#include "CLI11.hpp"
#include "tradespace/centrality.hpp"
#include "tradespace/productspace.hpp"
#include "tradespace/reference.hpp"
#include "tradespace/specialization.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using tradespace::draw_unit;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Eigen::MatrixXd random_binary(std::mt19937_64& gen, int locations, int products, double density) {
    Eigen::MatrixXd M(locations, products);
    for (int c = 0; c < locations; ++c)
        for (int p = 0; p < products; ++p) M(c, p) = draw_unit(gen) < density ? 1.0 : 0.0;
    return M;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel benchmarks: parallel vs serial reference"};
    int locations = 120;
    int products = 600;
    int repeats = 3;
    int jobs = 0;
    app.add_option("--locations", locations, "binary matrix rows");
    app.add_option("--products", products, "binary matrix columns");
    app.add_option("--repeat", repeats, "repetitions per measurement");
    app.add_option("--jobs", jobs, "OpenMP threads (0 = default)");
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
    printf("openmp threads: %d\n", jobs > 0 ? jobs : omp_get_max_threads());
#else
    printf("openmp: disabled at build time\n");
#endif

    std::mt19937_64 gen(7);
    Eigen::MatrixXd M = random_binary(gen, locations, products, 0.25);

    // proximity kernel vs triple-loop reference
    {
        auto t0 = std::chrono::steady_clock::now();
        Eigen::MatrixXd phi;
        for (int r = 0; r < repeats; ++r) phi = tradespace::proximity(M);
        const double kernel_s = seconds_since(t0) / repeats;

        t0 = std::chrono::steady_clock::now();
        Eigen::MatrixXd ref = tradespace::reference::proximity(M);
        const double ref_s = seconds_since(t0);

        const double diff = (phi - ref).cwiseAbs().maxCoeff();
        printf("proximity      %4dx%-4d kernel %8.3f ms   serial %8.3f ms   speedup %5.2fx   maxdiff %.2e\n",
               locations, products, kernel_s * 1e3, ref_s * 1e3, ref_s / kernel_s, diff);
    }

    // closeness batch vs Floyd-Warshall reference (smaller graph)
    {
        const int n = std::min(products, 220);
        Eigen::MatrixXd Msmall = random_binary(gen, locations, n, 0.2);
        Eigen::MatrixXd phi = tradespace::proximity(Msmall);

        tradespace::CountrySubspace sub;
        sub.country = "ALL";
        sub.n_nodes = n;
        std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(n));
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q)
                if (phi(p, q) > 0.0) {
                    adj[static_cast<size_t>(p)].emplace_back(q, 1.0 / phi(p, q));
                    adj[static_cast<size_t>(q)].emplace_back(p, 1.0 / phi(p, q));
                }
        sub.offsets.push_back(0);
        for (int p = 0; p < n; ++p) {
            for (auto& [q, len] : adj[static_cast<size_t>(p)]) {
                sub.neighbors.push_back(q);
                sub.lengths.push_back(len);
            }
            sub.offsets.push_back(static_cast<int>(sub.neighbors.size()));
        }

        auto t0 = std::chrono::steady_clock::now();
        tradespace::ClosenessColumn col;
        for (int r = 0; r < repeats; ++r) col = tradespace::closeness_all(sub);
        const double kernel_s = seconds_since(t0) / repeats;

        t0 = std::chrono::steady_clock::now();
        Eigen::MatrixXd lengths =
            Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                if (p != q && phi(p, q) > 0.0) lengths(p, q) = 1.0 / phi(p, q);
        std::vector<double> ref =
            tradespace::reference::closeness_from_distances(tradespace::reference::all_pairs_distances(lengths));
        const double ref_s = seconds_since(t0);

        double diff = 0.0;
        for (int p = 0; p < n; ++p) diff = std::max(diff, std::abs(col.closeness[static_cast<size_t>(p)] - ref[static_cast<size_t>(p)]));
        printf("closeness      %4d nodes  kernel %8.3f ms   serial %8.3f ms   speedup %5.2fx   maxdiff %.2e\n",
               n, kernel_s * 1e3, ref_s * 1e3, ref_s / kernel_s, diff);
    }

    // Balassa matrix vs per-cell reference
    {
        Eigen::MatrixXd X(locations, products);
        for (int c = 0; c < locations; ++c)
            for (int p = 0; p < products; ++p) X(c, p) = draw_unit(gen) < 0.4 ? 1000.0 * draw_unit(gen) : 0.0;
        tradespace::TradeTable table;
        table.hs_revision = "HS12";
        for (int c = 0; c < locations; ++c)
            for (int p = 0; p < products; ++p)
                if (X(c, p) > 0.0) {
                    char exporter[16], hs6[16];
                    snprintf(exporter, sizeof(exporter), "C%03d", c);
                    snprintf(hs6, sizeof(hs6), "%06d", 100000 + p);
                    table.rows.push_back({2022, exporter, c == 0 ? "C001" : "C000", hs6, X(c, p)});
                }

        auto t0 = std::chrono::steady_clock::now();
        tradespace::SpecializationSet set;
        for (int r = 0; r < repeats; ++r) set = tradespace::rca_matrix(table, 2022, tradespace::Scope::industry());
        const double kernel_s = seconds_since(t0) / repeats;

        t0 = std::chrono::steady_clock::now();
        Eigen::MatrixXd Xa = Eigen::MatrixXd::Zero(set.locations.size(), set.products.size());
        for (const auto& row : table.rows)
            Xa(set.locations.index_of(row.exporter), set.products.index_of(row.hs6)) += row.value;
        double diff = 0.0;
        for (Eigen::Index c = 0; c < Xa.rows(); ++c)
            for (Eigen::Index p = 0; p < Xa.cols(); ++p) {
                const double ref = tradespace::reference::balassa(Xa, c, p);
                if (std::isnan(ref)) continue;
                diff = std::max(diff, std::abs(set.R(c, p) - ref));
            }
        const double ref_s = seconds_since(t0);
        printf("balassa        %4dx%-4d kernel %8.3f ms   serial %8.3f ms   speedup %5.2fx   maxdiff %.2e\n",
               locations, products, kernel_s * 1e3, ref_s * 1e3, ref_s / kernel_s, diff);
    }

    return 0;
}
