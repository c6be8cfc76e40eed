#include "histoprompt/morphology/kmeans.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "histoprompt/core/base64.hpp"
#include "histoprompt/core/error.hpp"
#include "histoprompt/core/parallel.hpp"
#include "histoprompt/core/random.hpp"
#include "histoprompt/simd/kernels.hpp"

namespace histoprompt {

namespace {

struct Assignment {
    std::vector<int> labels;
    std::vector<double> sq_dist;
};

Assignment nearest(const Matrix& data, const Matrix& centroids) {
    const auto& kern = simd::active();
    Assignment a;
    a.labels.resize(data.rows());
    a.sq_dist.resize(data.rows());
    const std::size_t k = centroids.rows();
    const std::size_t d = data.cols();
    parallel_for(data.rows(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double dist = kern.squared_l2(data.row(i).data(), centroids.row(c).data(), d);
                if (dist < best_d) {
                    best_d = dist;
                    best = static_cast<int>(c);
                }
            }
            a.labels[i] = best;
            a.sq_dist[i] = best_d;
        }
    });
    return a;
}

double total(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

Matrix kmeanspp_init(const Matrix& data, std::size_t k, Rng& rng) {
    const std::size_t n = data.rows(), d = data.cols();
    const auto& kern = simd::active();
    Matrix centroids(k, d);
    std::size_t first = rng.below(n);
    std::copy_n(data.row(first).data(), d, centroids.row(0).data());

    std::vector<double> closest(n);
    for (std::size_t i = 0; i < n; ++i) closest[i] = kern.squared_l2(data.row(i).data(), centroids.row(0).data(), d);

    for (std::size_t c = 1; c < k; ++c) {
        const double sum = total(closest);
        std::size_t pick = 0;
        if (sum > 0.0) {
            const double target = rng.unit() * sum;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += closest[i];
                if (acc > target && closest[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.below(n);
        }
        std::copy_n(data.row(pick).data(), d, centroids.row(c).data());
        for (std::size_t i = 0; i < n; ++i) {
            closest[i] = std::min(closest[i], kern.squared_l2(data.row(i).data(), centroids.row(c).data(), d));
        }
    }
    return centroids;
}

}  // namespace

ClusterModel kmeans_fit(const Matrix& data, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    const std::size_t n = data.rows(), d = data.cols();
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (n < k) {
        throw Error(ErrorCode::TooFewPoints, "k-means with k=" + std::to_string(k) + " needs at least k points, got " +
                                                 std::to_string(n));
    }
    Rng rng(seed);
    ClusterModel model;
    model.k = k;
    model.seed = seed;
    model.centroids = kmeanspp_init(data, k, rng);

    Assignment a = nearest(data, model.centroids);
    model.inertia_trace.push_back(total(a.sq_dist));
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        Matrix next(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(a.labels[i]);
            ++counts[c];
            auto dst = next.row(c);
            const auto src = data.row(i);
            for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
        }
        std::vector<char> taken(n, 0);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                for (auto& v : next.row(c)) v /= static_cast<double>(counts[c]);
                continue;
            }
            // Empty cluster: move it onto the point worst served by its centroid.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!taken[i] && a.sq_dist[i] > far_d) {
                    far_d = a.sq_dist[i];
                    far = i;
                }
            }
            taken[far] = 1;
            a.sq_dist[far] = 0.0;
            std::copy_n(data.row(far).data(), d, next.row(c).data());
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            shift = std::max(shift, std::sqrt(simd::squared_l2(model.centroids.row(c), next.row(c))));
        }
        model.centroids = std::move(next);
        model.iterations = it + 1;

        a = nearest(data, model.centroids);
        const double inertia = total(a.sq_dist);
        assert(inertia <= model.inertia_trace.back() * (1 + 1e-12) + 1e-12);
        model.inertia_trace.push_back(inertia);
        if (shift < options.tolerance) break;
    }
    model.inertia = model.inertia_trace.back();
    return model;
}

ClusterModel kmeans_fit(const FeatureSet& fs, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    return kmeans_fit(Matrix::from(fs), k, seed, options);
}

std::vector<int> assign(const ClusterModel& model, const Matrix& data) {
    if (data.cols() != model.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "data has " + std::to_string(data.cols()) +
                                                      " columns, model expects " + std::to_string(model.dim()));
    }
    return nearest(data, model.centroids).labels;
}

std::vector<int> assign(const ClusterModel& model, const FeatureSet& fs) { return assign(model, Matrix::from(fs)); }

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(model.k * model.dim() * 8);
    for (std::size_t r = 0; r < model.centroids.rows(); ++r) {
        for (double v : model.centroids.row(r)) {
            const auto bits = std::bit_cast<std::uint64_t>(v);
            for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
        }
    }
    const nlohmann::json j{{"k", model.k},
                           {"seed", model.seed},
                           {"dim", model.dim()},
                           {"inertia", model.inertia},
                           {"iterations", model.iterations},
                           {"centroids", base64_encode(bytes)}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

ClusterModel load_cluster_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoFailure, path.string() + ": " + e.what());
    }
    ClusterModel model;
    model.k = j.at("k").get<std::size_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    const auto dim = j.at("dim").get<std::size_t>();
    model.inertia = j.value("inertia", 0.0);
    model.iterations = j.value("iterations", std::size_t{0});
    const auto bytes = base64_decode(j.at("centroids").get<std::string>());
    if (bytes.size() != model.k * dim * 8) {
        throw Error(ErrorCode::IoFailure, path.string() + ": centroid payload does not match k*dim");
    }
    model.centroids = Matrix(model.k, dim);
    for (std::size_t i = 0; i < model.k * dim; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
        model.centroids.data()[i] = std::bit_cast<double>(bits);
    }
    return model;
}

}  // namespace histoprompt
