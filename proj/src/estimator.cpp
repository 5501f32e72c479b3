#include "paap/estimator.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "paap/error.hpp"

namespace paap {

using nlohmann::json;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string tensor_name(int layer, int dir, const std::string& part) {
    return "lstm.l" + std::to_string(layer) + "." + (dir == 0 ? "fw" : "bw") +
           "." + part;
}

struct TensorRef {
    std::string name;
    std::vector<long> shape;
    long offset = 0;  // in floats

    long count() const {
        long c = 1;
        for (long s : shape) c *= s;
        return c;
    }
};

Eigen::MatrixXd read_matrix(const std::vector<float>& blob, const TensorRef& t,
                            long rows, long cols) {
    if (t.shape.size() != 2 || t.shape[0] != rows || t.shape[1] != cols)
        throw FormatError("estimator weights: tensor " + t.name +
                          " has wrong shape, expected " + std::to_string(rows) +
                          "x" + std::to_string(cols));
    if (t.offset < 0 ||
        t.offset + t.count() > static_cast<long>(blob.size()))
        throw FormatError("estimator weights: tensor " + t.name +
                          " extends past the blob");
    Eigen::MatrixXd m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
            const double v = blob[t.offset + i * cols + j];
            if (!std::isfinite(v))
                throw FormatError("estimator weights: non-finite value in " +
                                  t.name);
            m(i, j) = v;
        }
    return m;
}

Eigen::VectorXd read_vector(const std::vector<float>& blob, const TensorRef& t,
                            long len) {
    if (t.shape.size() != 1 || t.shape[0] != len)
        throw FormatError("estimator weights: tensor " + t.name +
                          " has wrong shape, expected length " +
                          std::to_string(len));
    if (t.offset < 0 ||
        t.offset + t.count() > static_cast<long>(blob.size()))
        throw FormatError("estimator weights: tensor " + t.name +
                          " extends past the blob");
    Eigen::VectorXd v(len);
    for (long i = 0; i < len; ++i) {
        const double x = blob[t.offset + i];
        if (!std::isfinite(x))
            throw FormatError("estimator weights: non-finite value in " +
                              t.name);
        v(i) = x;
    }
    return v;
}

}  // namespace

void EstimatorWeights::validate() const {
    if (layers.empty()) throw FormatError("estimator weights: no layers");
    const int h = hidden;
    for (int l = 0; l < n_layers(); ++l) {
        const int in = (l == 0) ? input_dim : 2 * h;
        for (int d = 0; d < 2; ++d) {
            const auto& lw = layers[l][d];
            const std::string where = tensor_name(l, d, "");
            if (lw.w_ih.rows() != 4 * h || lw.w_ih.cols() != in ||
                lw.w_hh.rows() != 4 * h || lw.w_hh.cols() != h ||
                lw.b_ih.size() != 4 * h || lw.b_hh.size() != 4 * h)
                throw FormatError("estimator weights: inconsistent shapes in " +
                                  where);
        }
    }
    if (proj_w.rows() != output_dim || proj_w.cols() != 2 * h ||
        proj_b.size() != output_dim)
        throw FormatError("estimator weights: projection shape mismatch");
}

EstimatorWeights load_estimator_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open estimator weights: " + path);

    std::string header_line;
    if (!std::getline(in, header_line))
        throw FormatError("estimator weights: missing JSON header");
    json header;
    try {
        header = json::parse(header_line);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("estimator weights: bad header: ") +
                          e.what());
    }

    EstimatorWeights w;
    w.hidden = header.at("h").get<int>();
    w.input_dim = header.at("in").get<int>();
    w.output_dim = header.at("out").get<int>();
    const int n_layers = header.at("layers").get<int>();
    if (w.hidden <= 0 || w.input_dim <= 0 || w.output_dim <= 0 || n_layers <= 0)
        throw FormatError("estimator weights: non-positive dimension in header");

    std::vector<TensorRef> refs;
    for (const auto& t : header.at("tensors")) {
        TensorRef ref;
        ref.name = t.at("name").get<std::string>();
        ref.shape = t.at("shape").get<std::vector<long>>();
        ref.offset = t.at("offset").get<long>();
        refs.push_back(ref);
    }
    auto find = [&](const std::string& name) -> const TensorRef& {
        for (const auto& r : refs)
            if (r.name == name) return r;
        throw FormatError("estimator weights: missing tensor " + name);
    };

    std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
    if (raw.size() % 4 != 0)
        throw FormatError("estimator weights: blob size not a multiple of 4");
    std::vector<float> blob(raw.size() / 4);
    std::memcpy(blob.data(), raw.data(), raw.size());

    const int h = w.hidden;
    w.layers.resize(n_layers);
    for (int l = 0; l < n_layers; ++l) {
        const int in_dim = (l == 0) ? w.input_dim : 2 * h;
        for (int d = 0; d < 2; ++d) {
            auto& lw = w.layers[l][d];
            lw.w_ih = read_matrix(blob, find(tensor_name(l, d, "W_ih")), 4 * h,
                                  in_dim);
            lw.w_hh = read_matrix(blob, find(tensor_name(l, d, "W_hh")), 4 * h,
                                  h);
            lw.b_ih = read_vector(blob, find(tensor_name(l, d, "b_ih")), 4 * h);
            lw.b_hh = read_vector(blob, find(tensor_name(l, d, "b_hh")), 4 * h);
        }
    }
    w.proj_w = read_matrix(blob, find("proj.W"), w.output_dim, 2 * h);
    w.proj_b = read_vector(blob, find("proj.b"), w.output_dim);
    w.validate();
    return w;
}

void save_estimator_weights(const std::string& path,
                            const EstimatorWeights& w) {
    w.validate();
    std::vector<float> blob;
    json tensors = json::array();

    auto push_matrix = [&](const std::string& name, const Eigen::MatrixXd& m) {
        tensors.push_back({{"name", name},
                           {"shape", {m.rows(), m.cols()}},
                           {"offset", static_cast<long>(blob.size())}});
        for (long i = 0; i < m.rows(); ++i)
            for (long j = 0; j < m.cols(); ++j)
                blob.push_back(static_cast<float>(m(i, j)));
    };
    auto push_vector = [&](const std::string& name, const Eigen::VectorXd& v) {
        tensors.push_back({{"name", name},
                           {"shape", {v.size()}},
                           {"offset", static_cast<long>(blob.size())}});
        for (long i = 0; i < v.size(); ++i)
            blob.push_back(static_cast<float>(v(i)));
    };

    for (int l = 0; l < w.n_layers(); ++l)
        for (int d = 0; d < 2; ++d) {
            push_matrix(tensor_name(l, d, "W_ih"), w.layers[l][d].w_ih);
            push_matrix(tensor_name(l, d, "W_hh"), w.layers[l][d].w_hh);
            push_vector(tensor_name(l, d, "b_ih"), w.layers[l][d].b_ih);
            push_vector(tensor_name(l, d, "b_hh"), w.layers[l][d].b_hh);
        }
    push_matrix("proj.W", w.proj_w);
    push_vector("proj.b", w.proj_b);

    json header = {{"h", w.hidden},       {"layers", w.n_layers()},
                   {"in", w.input_dim},   {"out", w.output_dim},
                   {"tensors", tensors}};

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open estimator weights for writing: " + path);
    out << header.dump() << "\n";
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size() * 4));
    if (!out) throw IoError("write failed: " + path);
}

Eigen::MatrixXd lstm_forward(const Eigen::MatrixXd& x,
                             const LstmLayerWeights& w, bool reversed) {
    const long n = x.rows();
    const long h = w.w_hh.cols();
    if (w.w_ih.cols() != x.cols() || w.w_ih.rows() != 4 * h ||
        w.w_hh.rows() != 4 * h || w.b_ih.size() != 4 * h ||
        w.b_hh.size() != 4 * h)
        throw ArgumentError("lstm_forward: inconsistent shapes");

    Eigen::MatrixXd out(n, h);
    Eigen::VectorXd hidden = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd cell = Eigen::VectorXd::Zero(h);
    for (long step = 0; step < n; ++step) {
        const long t = reversed ? n - 1 - step : step;
        const Eigen::VectorXd z = w.w_ih * x.row(t).transpose() + w.b_ih +
                                  w.w_hh * hidden + w.b_hh;
        for (long k = 0; k < h; ++k) {
            const double gi = sigmoid(z(k));
            const double gf = sigmoid(z(h + k));
            const double gc = std::tanh(z(2 * h + k));
            const double go = sigmoid(z(3 * h + k));
            cell(k) = gf * cell(k) + gi * gc;
            hidden(k) = go * std::tanh(cell(k));
        }
        out.row(t) = hidden.transpose();
    }
    return out;
}

AcousticParamMatrix estimate_params(const Waveform& w,
                                    const EstimatorWeights& weights,
                                    const FrameSpec& spec) {
    weights.validate();
    const Spectrogram spect = stft(w, spec);
    if (spect.n_bins() != weights.input_dim)
        throw ArgumentError("estimate_params: weights expect input dim " +
                            std::to_string(weights.input_dim) + ", got " +
                            std::to_string(spect.n_bins()));

    Eigen::MatrixXd x =
        (spect.frames.array() + kLogCompressionEps).log().matrix();
    for (int l = 0; l < weights.n_layers(); ++l) {
        const Eigen::MatrixXd fw = lstm_forward(x, weights.layers[l][0], false);
        const Eigen::MatrixXd bw = lstm_forward(x, weights.layers[l][1], true);
        Eigen::MatrixXd next(x.rows(), fw.cols() + bw.cols());
        next << fw, bw;
        x = std::move(next);
    }

    AcousticParamMatrix d;
    d.frame_spec = spec;
    d.values = (weights.proj_w * x.transpose()).transpose();
    d.values.rowwise() += weights.proj_b.transpose();
    return d;
}

}  // namespace paap
