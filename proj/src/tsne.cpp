#include "typeforge/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "typeforge/log.hpp"

namespace typeforge {

namespace {

// Conditional Gaussian row: P_j = exp(-d_j * beta) over j != i, normalized.
// Returns the Shannon entropy in nats. `dist_row` holds squared distances.
double gaussian_row(const std::vector<double>& dist_row, std::size_t i, double beta,
                    std::vector<double>& p_row) {
    const std::size_t m = dist_row.size();
    double sum_p = 0.0;
    double sum_dp = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (j == i) {
            p_row[j] = 0.0;
            continue;
        }
        double p = std::exp(-dist_row[j] * beta);
        p_row[j] = p;
        sum_p += p;
        sum_dp += dist_row[j] * p;
    }
    if (sum_p <= 0.0) {
        std::fill(p_row.begin(), p_row.end(), 0.0);
        return 0.0;
    }
    double entropy = std::log(sum_p) + beta * sum_dp / sum_p;
    for (double& p : p_row) p /= sum_p;
    return entropy;
}

// Bisection on the bandwidth until the row entropy hits log(perplexity).
double solve_row(const std::vector<double>& dist_row, std::size_t i, double target_entropy,
                 std::vector<double>& p_row) {
    double beta = 1.0;
    double beta_min = -std::numeric_limits<double>::infinity();
    double beta_max = std::numeric_limits<double>::infinity();
    double entropy = gaussian_row(dist_row, i, beta, p_row);
    for (int tries = 0; tries < 200 && std::abs(entropy - target_entropy) > 1e-7; ++tries) {
        if (entropy > target_entropy) {
            beta_min = beta;
            beta = std::isinf(beta_max) ? beta * 2.0 : (beta + beta_max) / 2.0;
        } else {
            beta_max = beta;
            beta = std::isinf(beta_min) ? beta / 2.0 : (beta + beta_min) / 2.0;
        }
        entropy = gaussian_row(dist_row, i, beta, p_row);
    }
    return entropy;
}

}  // namespace

ProjectionJob select_subtype_matrix(const TypeEmbeddingModel& model, const OntologyIndex& index,
                                    const std::vector<std::string>& roots,
                                    SelectReport* report) {
    SelectReport local;
    SelectReport& rep = report ? *report : local;

    std::vector<std::string> unique_roots;
    for (const auto& root : roots)
        if (std::find(unique_roots.begin(), unique_roots.end(), root) == unique_roots.end())
            unique_roots.push_back(root);
    if (unique_roots.size() < roots.size())
        logging::warn("duplicate roots ignored");

    ProjectionJob job;
    job.dim = model.dim();
    std::map<std::string, std::size_t> roots_per_type;
    for (const auto& root : unique_roots) {
        auto subtypes = index.direct_subtypes(root);
        if (subtypes.empty()) {
            rep.empty_roots.push_back(root);
            logging::warn("root has no direct sub-types: " + root);
            continue;
        }
        for (const auto& subtype : subtypes) {
            auto row_index = model.row_of(subtype);
            if (!row_index) {
                ++rep.skipped_no_vector;
                continue;
            }
            auto vec = model.row(*row_index);
            job.matrix.insert(job.matrix.end(), vec.begin(), vec.end());
            job.row_iris.push_back(subtype);
            job.labels.push_back(root);
            ++roots_per_type[subtype];
        }
    }
    for (const auto& [type, count] : roots_per_type)
        if (count > 1) ++rep.multi_root_types;
    if (rep.multi_root_types > 0)
        logging::warn(std::to_string(rep.multi_root_types) +
                      " sub-types fall under several roots and appear once per root");

    if (job.rows() < 5)
        throw DataError("too few points: " + std::to_string(job.rows()) +
                        " usable rows, need at least 5");
    return job;
}

std::vector<double> tsne_project(const ProjectionJob& job, TsneDiagnostics* diagnostics) {
    const std::size_t m = job.rows();
    if (m < 5) throw UsageError("projection needs at least 5 rows");
    if (job.dim == 0 || job.matrix.size() != m * job.dim)
        throw UsageError("projection matrix shape mismatch");
    if (job.perplexity <= 0.0) throw UsageError("perplexity must be positive");
    if (job.iterations == 0) throw UsageError("iteration count must be positive");
    if (job.learning_rate <= 0.0) throw UsageError("learning rate must be positive");

    TsneDiagnostics local;
    TsneDiagnostics& diag = diagnostics ? *diagnostics : local;
    diag.kl_trace.clear();
    diag.point_entropy.assign(m, 0.0);

    double perplexity = std::min(job.perplexity, (static_cast<double>(m) - 1.0) / 3.0);
    if (perplexity < job.perplexity)
        logging::warn("perplexity clamped to " + format_double(perplexity) + " for " +
                      std::to_string(m) + " points");
    diag.effective_perplexity = perplexity;
    const double target_entropy = std::log(perplexity);

    // Pairwise squared Euclidean distances.
    std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        const double* a = job.matrix.data() + i * job.dim;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double* b = job.matrix.data() + j * job.dim;
            double d2 = 0.0;
            for (std::size_t c = 0; c < job.dim; ++c) {
                double diff = a[c] - b[c];
                d2 += diff * diff;
            }
            dist[i][j] = d2;
            dist[j][i] = d2;
        }
    }

    // High-dimensional affinities: solve each row, symmetrize, normalize.
    std::vector<double> p(m * m, 0.0);
    std::vector<double> p_row(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        diag.point_entropy[i] = solve_row(dist[i], i, target_entropy, p_row);
        for (std::size_t j = 0; j < m; ++j) p[i * m + j] = p_row[j];
    }
    double p_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            double v = p[i * m + j] + p[j * m + i];
            p[i * m + j] = v;
            p[j * m + i] = v;
            p_sum += 2.0 * v;
        }
    for (double& v : p) v = std::max(v / p_sum, 1e-12);
    for (std::size_t i = 0; i < m; ++i) p[i * m + i] = 0.0;

    constexpr double kExaggeration = 12.0;
    constexpr std::size_t kExaggerationEnd = 250;
    constexpr std::size_t kMomentumSwitch = 250;
    for (double& v : p) v *= kExaggeration;

    std::mt19937_64 rng(job.seed);
    std::normal_distribution<double> init(0.0, 1e-4);
    std::vector<double> y(m * 2);
    for (double& v : y) v = init(rng);
    std::vector<double> velocity(m * 2, 0.0);
    std::vector<double> gains(m * 2, 1.0);
    std::vector<double> grad(m * 2, 0.0);
    std::vector<double> num(m * m, 0.0);

    const std::size_t trace_start = job.iterations / 2;
    for (std::size_t iter = 0; iter < job.iterations; ++iter) {
        if (iter == kExaggerationEnd)
            for (double& v : p) v /= kExaggeration;

        // Student-t kernel numerators and their total.
        double num_sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            num[i * m + i] = 0.0;
            for (std::size_t j = i + 1; j < m; ++j) {
                double dx = y[i * 2] - y[j * 2];
                double dy = y[i * 2 + 1] - y[j * 2 + 1];
                double v = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i * m + j] = v;
                num[j * m + i] = v;
                num_sum += 2.0 * v;
            }
        }

        // Gradient of the KL objective.
        for (std::size_t i = 0; i < m; ++i) {
            double gx = 0.0;
            double gy = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i) continue;
                double q = std::max(num[i * m + j] / num_sum, 1e-12);
                double mult = (p[i * m + j] - q) * num[i * m + j];
                gx += mult * (y[i * 2] - y[j * 2]);
                gy += mult * (y[i * 2 + 1] - y[j * 2 + 1]);
            }
            grad[i * 2] = gx;
            grad[i * 2 + 1] = gy;
        }

        const double momentum = iter < kMomentumSwitch ? 0.5 : 0.8;
        for (std::size_t c = 0; c < m * 2; ++c) {
            bool same_sign = (grad[c] > 0.0) == (velocity[c] > 0.0);
            gains[c] = same_sign ? gains[c] * 0.8 : gains[c] + 0.2;
            if (gains[c] < 0.01) gains[c] = 0.01;
            velocity[c] = momentum * velocity[c] - job.learning_rate * gains[c] * grad[c];
            y[c] += velocity[c];
        }
        double mean_x = 0.0;
        double mean_y = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            mean_x += y[i * 2];
            mean_y += y[i * 2 + 1];
        }
        mean_x /= static_cast<double>(m);
        mean_y /= static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            y[i * 2] -= mean_x;
            y[i * 2 + 1] -= mean_y;
        }
        for (double v : y)
            if (!std::isfinite(v))
                throw DataError("non-finite coordinate at iteration " + std::to_string(iter));

        if (iter >= trace_start) {
            double kl = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    if (j == i) continue;
                    double q = std::max(num[i * m + j] / num_sum, 1e-12);
                    kl += p[i * m + j] * std::log(p[i * m + j] / q);
                }
            diag.kl_trace.push_back(kl);
        }
    }
    if (!diag.kl_trace.empty()) diag.final_kl = diag.kl_trace.back();
    return y;
}

}  // namespace typeforge
