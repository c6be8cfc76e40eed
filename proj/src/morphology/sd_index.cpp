#include "histoprompt/morphology/sd_index.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <string>

#include "histoprompt/core/error.hpp"
#include "histoprompt/core/parallel.hpp"
#include "histoprompt/core/random.hpp"
#include "histoprompt/simd/kernels.hpp"

namespace histoprompt {

namespace {

// Euclidean norm of the per-dimension population variance of the selected rows.
double variance_norm(const Matrix& data, const std::vector<std::size_t>& rows) {
    if (rows.empty()) return 0.0;
    const std::size_t d = data.cols();
    std::vector<double> mean(d, 0.0);
    for (auto r : rows) simd::axpy(1.0, data.row(r), mean);
    for (auto& m : mean) m /= static_cast<double>(rows.size());
    std::vector<double> var(d, 0.0);
    for (auto r : rows) {
        const auto x = data.row(r);
        for (std::size_t j = 0; j < d; ++j) var[j] += (x[j] - mean[j]) * (x[j] - mean[j]);
    }
    double sq = 0.0;
    for (auto v : var) {
        const double pv = v / static_cast<double>(rows.size());
        sq += pv * pv;
    }
    return std::sqrt(sq);
}

}  // namespace

SDTerms sd_terms(const Matrix& data, const ClusterModel& model, std::span<const int> assignment) {
    const std::size_t k = model.k;
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "SD index needs k >= 2");
    if (data.cols() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "data and model dimensions differ");
    if (assignment.size() != data.rows()) throw Error(ErrorCode::CountMismatch, "one assignment per row required");

    std::vector<std::size_t> all(data.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const double total_norm = variance_norm(data, all);
    if (!(total_norm > 0.0)) throw Error(ErrorCode::DegenerateData, "data has zero variance");

    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < assignment.size(); ++i) members[static_cast<std::size_t>(assignment[i])].push_back(i);
    double scat = 0.0;
    for (const auto& m : members) scat += variance_norm(data, m);
    scat /= static_cast<double>(k) * total_norm;

    double d_max = 0.0;
    double d_min = std::numeric_limits<double>::infinity();
    double inverse_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            const double dist = std::sqrt(simd::squared_l2(model.centroids.row(i), model.centroids.row(j)));
            d_max = std::max(d_max, dist);
            d_min = std::min(d_min, dist);
            row_sum += dist;
        }
        if (row_sum > 0.0) inverse_sum += 1.0 / row_sum;
    }
    if (!(d_min > 0.0)) throw Error(ErrorCode::CoincidentCentroids, "two centroids coincide");
    return {scat, (d_max / d_min) * inverse_sum};
}

SDTerms sd_terms(const Matrix& data, const ClusterModel& model) {
    const auto labels = assign(model, data);
    return sd_terms(data, model, labels);
}

SDIndexValue sd_index(const Matrix& data, const ClusterModel& model, double alpha) {
    const auto t = sd_terms(data, model);
    return {t.scat, t.dis, alpha * t.scat + t.dis};
}

SDIndexValue sd_index(const FeatureSet& fs, const ClusterModel& model, double alpha) {
    return sd_index(Matrix::from(fs), model, alpha);
}

Selection select_k(const Matrix& data, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                   const KMeansOptions& options) {
    if (k_min < 2 || k_min > k_max || k_max > data.rows()) {
        throw Error(ErrorCode::InvalidArgument, "sweep requires 2 <= k_min <= k_max <= n (got [" +
                                                    std::to_string(k_min) + ", " + std::to_string(k_max) + "], n=" +
                                                    std::to_string(data.rows()) + ")");
    }
    const std::size_t count = k_max - k_min + 1;
    std::vector<ClusterModel> models(count);
    std::vector<SDTerms> terms(count);
    std::vector<std::exception_ptr> errors(count);
    parallel_for(
        count,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t k = k_min + i;
                try {
                    models[i] = kmeans_fit(data, k, derive_seed(seed, k), options);
                    terms[i] = sd_terms(data, models[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        },
        1);
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    Selection out;
    out.report.alpha = terms.back().dis;
    std::size_t best = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const double sd = out.report.alpha * terms[i].scat + terms[i].dis;
        out.report.per_k.push_back({k_min + i, terms[i].scat, terms[i].dis, sd});
        if (sd < out.report.per_k[best].sd) best = i;
    }
    out.report.chosen_k = k_min + best;
    out.model = std::move(models[best]);
    return out;
}

Selection select_k(const FeatureSet& fs, std::size_t k_min, std::size_t k_max, std::uint64_t seed,
                   const KMeansOptions& options) {
    return select_k(Matrix::from(fs), k_min, k_max, seed, options);
}

void save_sd_report(const SDIndexReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << "k,scat,dis,sd\n";
    char buf[128];
    for (const auto& r : report.per_k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.k, r.scat, r.dis, r.sd);
        out << buf;
    }
}

}  // namespace histoprompt
