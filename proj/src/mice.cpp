#include "longipred/mice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "longipred/parallel.hpp"

namespace longipred {

namespace {

struct ColumnPlan {
    Index col = 0;
    std::vector<Index> missing_rows;
    std::vector<Index> observed_rows;
};

std::string column_label(const LongitudinalDataset& ds, Index col) {
    if (col < ds.n_features()) return ds.feature_names()[static_cast<std::size_t>(col)];
    if (col < ds.outcome_col())
        return ds.covariate_names()[static_cast<std::size_t>(col - ds.n_features())];
    return ds.outcome_name();
}

// One chained-equations pass producing a single complete matrix.
Matrix impute_once(const LongitudinalDataset& ds, const std::vector<ColumnPlan>& plans,
                   const Matrix& mean_filled, const ImputationConfig& cfg, std::mt19937_64& rng) {
    Matrix work = mean_filled;
    const Index n = work.rows();
    const Index d = work.cols();

    for (int cycle = 0; cycle < cfg.n_cycles; ++cycle) {
        for (const ColumnPlan& plan : plans) {
            // Predictors: intercept + every other column, most recent values.
            Matrix design(n, d);
            design.col(0).setOnes();
            Index k = 1;
            for (Index j = 0; j < d; ++j) {
                if (j == plan.col) continue;
                design.col(k++) = work.col(j);
            }
            Matrix train(static_cast<Index>(plan.observed_rows.size()), d);
            Vector target(static_cast<Index>(plan.observed_rows.size()));
            for (Index r = 0; r < train.rows(); ++r) {
                const Index src = plan.observed_rows[static_cast<std::size_t>(r)];
                train.row(r) = design.row(src);
                target(r) = work(src, plan.col);
            }
            Eigen::ColPivHouseholderQR<Matrix> qr(train);
            if (qr.rank() < d)
                throw DegenerateDesignError("mice: rank-deficient predictor matrix while imputing column '" +
                                            column_label(ds, plan.col) + "'");
            const Vector beta = qr.solve(target);
            const Vector pred = design * beta;

            for (const Index miss : plan.missing_rows) {
                const double target_pred = pred(miss);
                // n_donors observed rows with the closest predictions; ties by row order.
                std::vector<std::pair<double, Index>> dist;
                dist.reserve(plan.observed_rows.size());
                for (const Index obs : plan.observed_rows)
                    dist.emplace_back(std::abs(pred(obs) - target_pred), obs);
                const auto k_donors = static_cast<std::size_t>(cfg.n_donors);
                std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_donors),
                                  dist.end());
                const auto pick = static_cast<std::size_t>(bounded(rng, k_donors));
                work(miss, plan.col) = work(dist[pick].second, plan.col);
            }
        }
    }
    return work;
}

}  // namespace

ImputedSet mice_pmm(const LongitudinalDataset& ds, const ImputationConfig& cfg, int workers) {
    cfg.validate();
    if (ds.rows() == 0) throw SizeError("mice: dataset is empty");

    const Index n = ds.rows();
    const Index d = ds.n_columns();

    std::vector<ColumnPlan> plans;
    ImputedSet out;
    out.config = cfg;
    for (Index j = 0; j < d; ++j) {
        ColumnPlan plan;
        plan.col = j;
        for (Index r = 0; r < n; ++r)
            (ds.observed()(r, j) ? plan.observed_rows : plan.missing_rows).push_back(r);
        if (plan.missing_rows.empty()) continue;
        if (plan.observed_rows.empty())
            throw UnimputableError("mice: column '" + column_label(ds, j) +
                                   "' has no observed entries");
        if (static_cast<int>(plan.observed_rows.size()) < cfg.n_donors)
            throw ConfigError("mice: column '" + column_label(ds, j) + "' has only " +
                              std::to_string(plan.observed_rows.size()) +
                              " observed entries, fewer than n_donors=" +
                              std::to_string(cfg.n_donors));
        for (const Index r : plan.missing_rows) out.imputed_cells.push_back({r, j});
        plans.push_back(std::move(plan));
    }
    // Fixed deterministic visit order: ascending missing count, ties by column index.
    std::stable_sort(plans.begin(), plans.end(), [](const ColumnPlan& a, const ColumnPlan& b) {
        return a.missing_rows.size() < b.missing_rows.size();
    });

    Matrix mean_filled = ds.cells();
    for (Index j = 0; j < d; ++j) {
        double sum = 0.0;
        Index cnt = 0;
        for (Index r = 0; r < n; ++r) {
            if (ds.observed()(r, j)) {
                sum += mean_filled(r, j);
                ++cnt;
            }
        }
        const double mean = cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
        for (Index r = 0; r < n; ++r)
            if (!ds.observed()(r, j)) mean_filled(r, j) = mean;
    }

    std::vector<Matrix> completed(static_cast<std::size_t>(cfg.m_imputations));
    parallel_for_indexed(completed.size(), workers, [&](std::size_t m) {
        auto rng = make_rng(cfg.seed, "imputation", static_cast<std::uint64_t>(m));
        completed[m] = plans.empty() ? mean_filled : impute_once(ds, plans, mean_filled, cfg, rng);
    });
    out.datasets.reserve(completed.size());
    for (Matrix& complete : completed)
        out.datasets.push_back(ds.with_complete_cells(std::move(complete)));
    return out;
}

double efficiency(double gamma, int m) {
    if (gamma < 0.0 || gamma > 1.0) throw DomainError("efficiency: gamma must lie in [0, 1]");
    if (m < 1) throw DomainError("efficiency: m must be >= 1");
    return 1.0 / (1.0 + gamma / static_cast<double>(m));
}

std::vector<SweepRow> imputation_sweep(const LongitudinalDataset& ds, const ImputationConfig& base,
                                       const std::vector<int>& m_values,
                                       const std::function<double(const ImputedSet&)>& fit_eval) {
    if (m_values.empty()) throw ConfigError("imputation_sweep: m_values is empty");
    for (int m : m_values)
        if (m < 1) throw ConfigError("imputation_sweep: every m must be >= 1");
    std::vector<SweepRow> rows;
    for (int m : m_values) {
        ImputationConfig cfg = base;
        cfg.m_imputations = m;
        try {
            rows.push_back({m, fit_eval(mice_pmm(ds, cfg))});
        } catch (const std::exception& e) {
            throw HarnessError("imputation_sweep: failure at m=" + std::to_string(m) + ": " +
                               e.what());
        }
    }
    return rows;
}

}  // namespace longipred
