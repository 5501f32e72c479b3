#include "paap/ap_weights.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

#include "paap/error.hpp"

namespace paap {

using nlohmann::json;

Eigen::MatrixXd augment_bias(const Eigen::MatrixXd& d) {
    Eigen::MatrixXd out(d.rows(), d.cols() + 1);
    out.leftCols(d.cols()) = d;
    out.col(d.cols()).setOnes();
    return out;
}

APWeights fit_weights(const std::vector<AcousticParamMatrix>& d_list,
                      const std::vector<PhonemeLogits>& p_list,
                      double ridge_lambda) {
    if (ridge_lambda < 0.0)
        throw ArgumentError("fit_weights: ridge_lambda must be >= 0");
    if (d_list.size() != p_list.size())
        throw ArgumentError("fit_weights: feature and logits counts differ");
    if (d_list.empty()) throw ArgumentError("fit_weights: no utterances");

    const int dim = kNumParams + 1;
    long total_frames = 0;
    for (std::size_t u = 0; u < d_list.size(); ++u) {
        if (d_list[u].n_frames() != p_list[u].n_frames())
            throw ArgumentError(
                "fit_weights: frame count mismatch in utterance " +
                std::to_string(u) + " (" + std::to_string(d_list[u].n_frames()) +
                " vs " + std::to_string(p_list[u].n_frames()) + ")");
        total_frames += d_list[u].n_frames();
    }
    if (total_frames < dim + 1)
        throw ArgumentError("fit_weights: need at least " +
                            std::to_string(dim + 1) + " total frames");

    // Accumulate the normal equations utterance by utterance, in order.
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd xty = Eigen::MatrixXd::Zero(dim, kNumPhonemeClasses);
    for (std::size_t u = 0; u < d_list.size(); ++u) {
        const Eigen::MatrixXd x = augment_bias(d_list[u].values);
        xtx.noalias() += x.transpose() * x;
        xty.noalias() += x.transpose() * p_list[u].values;
    }

    Eigen::MatrixXd reg = xtx;
    for (int i = 0; i < kNumParams; ++i) reg(i, i) += ridge_lambda;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
    const Eigen::VectorXd pivots = ldlt.vectorD();
    const bool rank_deficient =
        ridge_lambda == 0.0 &&
        pivots.minCoeff() <= 1e-12 * pivots.maxCoeff();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || rank_deficient)
        throw DegenerateSignalError(
            "fit_weights: normal equations are singular; use ridge_lambda > 0");
    Eigen::MatrixXd w = ldlt.solve(xty);

    // LDLT succeeds on semi-definite systems; verify the residual so a
    // rank-deficient lambda=0 fit is reported rather than returned.
    const double resid = (reg * w - xty).cwiseAbs().maxCoeff();
    const double scale = xty.cwiseAbs().maxCoeff();
    if (!w.allFinite() || resid > 1e-6 * std::max(scale, 1.0))
        throw DegenerateSignalError(
            "fit_weights: normal equations are singular; use ridge_lambda > 0");

    APWeights out;
    out.values = std::move(w);
    out.vocab = p_list.front().vocab;
    out.params.assign(param_names().begin(), param_names().end());
    out.ridge_lambda = ridge_lambda;
    return out;
}

void save_weights(const std::string& path, const APWeights& w) {
    json doc;
    doc["vocab"] = w.vocab.labels;
    doc["params"] = w.params;
    doc["ridge_lambda"] = w.ridge_lambda;
    json rows = json::array();
    for (int i = 0; i < w.values.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < w.values.cols(); ++j) row.push_back(w.values(i, j));
        rows.push_back(row);
    }
    doc["w"] = rows;

    std::ofstream out(path);
    if (!out) throw IoError("cannot open weights file for writing: " + path);
    out << doc.dump(2) << "\n";
}

APWeights load_weights_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open weights file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("weights JSON parse error: ") + e.what());
    }

    APWeights w;
    w.vocab.labels = doc.at("vocab").get<std::vector<std::string>>();
    w.vocab.validate();
    w.params = doc.at("params").get<std::vector<std::string>>();
    if (w.params.size() != kNumParams)
        throw FormatError("weights: expected 25 parameter names");
    w.ridge_lambda = doc.at("ridge_lambda").get<double>();

    const auto& rows = doc.at("w");
    if (rows.size() != kNumParams + 1)
        throw FormatError("weights: expected 26 rows");
    w.values.resize(kNumParams + 1, kNumPhonemeClasses);
    for (int i = 0; i <= kNumParams; ++i) {
        const auto& row = rows[i];
        if (row.size() != kNumPhonemeClasses)
            throw FormatError("weights: row " + std::to_string(i) +
                              " must have 41 entries");
        for (int j = 0; j < kNumPhonemeClasses; ++j) {
            const double v = row[j].get<double>();
            if (!std::isfinite(v))
                throw FormatError("weights: non-finite value at row " +
                                  std::to_string(i));
            w.values(i, j) = v;
        }
    }
    return w;
}

}  // namespace paap
