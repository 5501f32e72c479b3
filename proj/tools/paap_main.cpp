// paap: extract temporal acoustic parameters, fit acoustic-phonetic
// weights, and score enhanced speech with the phoneme-weighted loss.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "paap/analysis.hpp"
#include "paap/ap_weights.hpp"
#include "paap/audio_io.hpp"
#include "paap/error.hpp"
#include "paap/estimator.hpp"
#include "paap/feature_io.hpp"
#include "paap/paap_loss.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// FNV-1a over the serialized run configuration; embedded in outputs so
// equal digests imply byte-identical results.
std::string config_digest(const json& cfg) {
    const std::string s = cfg.dump();
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

paap::Waveform load_audio_16k(const std::string& path) {
    paap::Waveform w = paap::read_wav(path);
    return paap::resample(w, paap::kCanonicalSampleRate);
}

paap::AcousticParamMatrix extract_features(
    const std::string& path, const paap::FrameSpec& spec,
    const std::string& backend, const paap::EstimatorWeights* est_weights) {
    if (!ends_with(path, ".wav")) return paap::read_features(path);
    const paap::Waveform w = load_audio_16k(path);
    if (backend == "neural") {
        if (!est_weights)
            throw paap::ArgumentError("neural backend needs --weights");
        return paap::estimate_params(w, *est_weights, spec);
    }
    return paap::extract_all(w, spec);
}

// Basename-stem -> path map over a directory, filtered by extension set.
std::map<std::string, std::string> scan_dir(
    const std::string& dir, const std::vector<std::string>& exts) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (std::find(exts.begin(), exts.end(), ext) == exts.end()) continue;
        out[entry.path().stem().string()] = entry.path().string();
    }
    return out;
}

int run_mix(const std::string& clean, const std::string& noise, double snr_db,
            const std::string& out_path) {
    const paap::Waveform c = paap::read_wav(clean);
    const paap::Waveform n = paap::read_wav(noise);
    paap::write_wav(out_path, paap::mix_at_snr(c, n, snr_db));
    return 0;
}

int run_extract(const std::string& in_path, const std::string& out_path,
                const std::string& backend, const std::string& weights_path,
                const paap::FrameSpec& spec) {
    json cfg = {{"cmd", "extract"}, {"backend", backend},
                {"hop", spec.hop},  {"win", spec.win},
                {"fft", spec.fft_size}};
    paap::EstimatorWeights est;
    const paap::EstimatorWeights* est_ptr = nullptr;
    if (backend == "neural") {
        est = paap::load_estimator_weights(weights_path);
        est_ptr = &est;
        cfg["weights"] = weights_path;
    }
    const paap::AcousticParamMatrix d =
        extract_features(in_path, spec, backend, est_ptr);
    if (ends_with(out_path, ".csv"))
        paap::write_features_csv(out_path, d, config_digest(cfg));
    else
        paap::write_features_bin(out_path, d);
    return 0;
}

int run_align_ingest(const std::string& in_path, int n_frames,
                     const std::string& out_path,
                     const paap::FrameSpec& spec) {
    const paap::PhonemeVocab vocab = paap::PhonemeVocab::default_vocab();
    const paap::AlignmentDoc doc = paap::parse_alignment(in_path, vocab);
    const paap::PhonemeLogits logits =
        paap::to_frame_logits(doc, n_frames, spec, paap::kCanonicalSampleRate);
    paap::write_logits_bin(out_path, logits);
    return 0;
}

int run_fit_weights(const std::string& features_dir,
                    const std::string& logits_dir, double lambda,
                    const std::string& out_path) {
    const auto feature_files = scan_dir(features_dir, {".csv", ".bin"});
    const auto logit_files = scan_dir(logits_dir, {".bin", ".json"});
    const paap::PhonemeVocab vocab = paap::PhonemeVocab::default_vocab();
    const paap::FrameSpec spec;

    std::vector<paap::AcousticParamMatrix> d_list;
    std::vector<paap::PhonemeLogits> p_list;
    for (const auto& [stem, path] : feature_files) {
        const auto it = logit_files.find(stem);
        if (it == logit_files.end()) {
            std::cerr << "warning: no alignment for " << stem << ", skipped\n";
            continue;
        }
        paap::AcousticParamMatrix d = paap::read_features(path);
        paap::PhonemeLogits p =
            ends_with(it->second, ".json")
                ? paap::to_frame_logits(
                      paap::parse_alignment(it->second, vocab), d.n_frames(),
                      spec, paap::kCanonicalSampleRate)
                : paap::read_logits_bin(it->second, vocab);
        d_list.push_back(std::move(d));
        p_list.push_back(std::move(p));
    }
    if (d_list.empty())
        throw paap::ArgumentError("fit-weights: no matching utterances found");

    const paap::APWeights w = paap::fit_weights(d_list, p_list, lambda);
    paap::save_weights(out_path, w);
    std::cout << "fitted weights on " << d_list.size() << " utterances -> "
              << out_path << "\n";
    return 0;
}

int run_loss(const std::string& enhanced, const std::string& clean,
             const std::string& alignment, const std::string& weights_path,
             const std::string& weight_mode, double aux_scale,
             const std::string& backend, const std::string& est_weights_path,
             const paap::FrameSpec& spec) {
    const paap::APWeights w = paap::load_weights_json(weights_path);
    paap::EstimatorWeights est;
    const paap::EstimatorWeights* est_ptr = nullptr;
    if (backend == "neural") {
        est = paap::load_estimator_weights(est_weights_path);
        est_ptr = &est;
    }

    const paap::AcousticParamMatrix d_e =
        extract_features(enhanced, spec, backend, est_ptr);
    const paap::AcousticParamMatrix d_c =
        extract_features(clean, spec, backend, est_ptr);

    const paap::AlignmentDoc doc = paap::parse_alignment(alignment, w.vocab);
    const paap::PhonemeLogits logits = paap::to_frame_logits(
        doc, d_c.n_frames(), spec, paap::kCanonicalSampleRate);
    const std::vector<int> idx = paap::argmax_phonemes(logits);

    paap::PaapLossConfig cfg;
    cfg.weight_mode = (weight_mode == "absolute") ? paap::WeightMode::Absolute
                                                  : paap::WeightMode::Literal;
    cfg.aux_scale = aux_scale;
    const double loss = paap::paap_loss(d_e, d_c, idx, w, cfg);

    json out = {{"paap_loss", loss},
                {"weight_mode", weight_mode},
                {"aux_scale", aux_scale},
                {"scaled_loss", aux_scale * loss},
                {"n_frames", d_c.n_frames()}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_analyze(const std::string& enhanced_dir,
                const std::string& baseline_dir, const std::string& clean_dir,
                const std::string& alignments_dir, const std::string& out_path,
                const std::string& plot_data_dir,
                const paap::FrameSpec& spec) {
    json cfg = {{"cmd", "analyze"},
                {"hop", spec.hop},
                {"win", spec.win},
                {"fft", spec.fft_size}};
    const std::string digest = config_digest(cfg);
    const paap::PhonemeVocab vocab = paap::PhonemeVocab::default_vocab();
    const std::vector<std::string> exts = {".wav", ".csv", ".bin"};
    const auto enhanced = scan_dir(enhanced_dir, exts);
    const auto baseline = scan_dir(baseline_dir, exts);
    const auto clean = scan_dir(clean_dir, exts);
    const auto alignments = scan_dir(alignments_dir, {".json"});

    Eigen::MatrixXd all_e(0, paap::kNumParams), all_b(0, paap::kNumParams),
        all_c(0, paap::kNumParams);
    std::vector<int> all_idx;
    int used = 0;
    for (const auto& [stem, clean_path] : clean) {
        const auto ie = enhanced.find(stem);
        const auto ib = baseline.find(stem);
        const auto ia = alignments.find(stem);
        if (ie == enhanced.end() || ib == baseline.end() ||
            ia == alignments.end()) {
            std::cerr << "warning: incomplete set for " << stem << ", skipped\n";
            continue;
        }
        const paap::AcousticParamMatrix d_c =
            extract_features(clean_path, spec, "dsp", nullptr);
        const paap::AcousticParamMatrix d_e =
            extract_features(ie->second, spec, "dsp", nullptr);
        const paap::AcousticParamMatrix d_b =
            extract_features(ib->second, spec, "dsp", nullptr);
        if (d_e.n_frames() != d_c.n_frames() ||
            d_b.n_frames() != d_c.n_frames())
            throw paap::ArgumentError("analyze: frame counts differ for " +
                                      stem);
        const paap::PhonemeLogits logits = paap::to_frame_logits(
            paap::parse_alignment(ia->second, vocab), d_c.n_frames(), spec,
            paap::kCanonicalSampleRate);
        const std::vector<int> idx = paap::argmax_phonemes(logits);

        const long base = all_c.rows();
        all_c.conservativeResize(base + d_c.n_frames(), Eigen::NoChange);
        all_e.conservativeResize(base + d_c.n_frames(), Eigen::NoChange);
        all_b.conservativeResize(base + d_c.n_frames(), Eigen::NoChange);
        all_c.bottomRows(d_c.n_frames()) = d_c.values;
        all_e.bottomRows(d_c.n_frames()) = d_e.values;
        all_b.bottomRows(d_c.n_frames()) = d_b.values;
        all_idx.insert(all_idx.end(), idx.begin(), idx.end());
        ++used;
    }
    if (used == 0) throw paap::ArgumentError("analyze: no complete utterances");

    const paap::PaapReport report =
        paap::build_report(all_e, all_b, all_c, all_idx, vocab);
    const paap::ReportFormat format = ends_with(out_path, ".csv")
                                          ? paap::ReportFormat::Csv
                                          : paap::ReportFormat::Json;
    paap::emit_report(report, out_path, format, digest);
    std::cout << "analyzed " << used << " utterances -> " << out_path << "\n";

    if (!plot_data_dir.empty()) {
        fs::create_directories(plot_data_dir);
        auto dump = [&](const std::string& name, const std::string& content) {
            std::ofstream f(fs::path(plot_data_dir) / name, std::ios::binary);
            f << "# config=" << digest << "\n" << content;
        };
        dump("improvement_bars.csv", paap::plot_bar_csv(report));
        dump("scatter_loudness.csv",
             paap::plot_scatter_csv(report, "loudness"));
        dump("scatter_F1freq.csv", paap::plot_scatter_csv(report, "F1freq"));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phonetic-aligned acoustic parameter toolkit"};
    app.require_subcommand(1);

    paap::FrameSpec spec;
    app.add_option("--hop", spec.hop, "Frame hop in samples")
        ->capture_default_str();
    app.add_option("--win", spec.win, "Analysis window length")
        ->capture_default_str();

    std::string in_path, out_path, backend = "dsp", weights_path;
    std::string clean_path, noise_path, enhanced_path, alignment_path;
    std::string features_dir, logits_dir, baseline_dir, clean_dir,
        alignments_dir, plot_data_dir;
    std::string weight_mode = "literal";
    double snr_db = 0.0, lambda = paap::kDefaultRidgeLambda, aux_scale = 0.1;
    int n_frames = 0;

    auto* mix = app.add_subcommand("mix", "Mix clean speech with noise at an SNR");
    mix->add_option("--clean", clean_path)->required();
    mix->add_option("--noise", noise_path)->required();
    mix->add_option("--snr-db", snr_db)->required();
    mix->add_option("--out", out_path)->required();

    auto* extract =
        app.add_subcommand("extract", "Extract the 25 acoustic parameters");
    extract->add_option("--in", in_path)->required();
    extract->add_option("--out", out_path)->required();
    extract->add_option("--backend", backend)
        ->check(CLI::IsMember({"dsp", "neural"}))
        ->capture_default_str();
    extract->add_option("--weights", weights_path,
                        "Estimator weight file (neural backend)");

    auto* align = app.add_subcommand("align-ingest",
                                     "Convert an alignment JSON to frame logits");
    align->add_option("--in", in_path)->required();
    align->add_option("--frames", n_frames)->required();
    align->add_option("--out", out_path)->required();

    auto* fit = app.add_subcommand("fit-weights",
                                   "Fit acoustic-phonetic regression weights");
    fit->add_option("--features", features_dir)->required();
    fit->add_option("--logits", logits_dir)->required();
    fit->add_option("--lambda", lambda)->capture_default_str();
    fit->add_option("--out", out_path)->required();

    auto* loss = app.add_subcommand("loss", "Compute the phoneme-weighted loss");
    loss->add_option("--enhanced", enhanced_path)->required();
    loss->add_option("--clean", clean_path)->required();
    loss->add_option("--alignment", alignment_path)->required();
    loss->add_option("--weights", weights_path)->required();
    loss->add_option("--weight-mode", weight_mode)
        ->check(CLI::IsMember({"literal", "absolute"}))
        ->capture_default_str();
    loss->add_option("--aux-scale", aux_scale)->capture_default_str();
    loss->add_option("--backend", backend)
        ->check(CLI::IsMember({"dsp", "neural"}))
        ->capture_default_str();
    std::string est_weights_path;
    loss->add_option("--estimator-weights", est_weights_path);

    auto* analyze =
        app.add_subcommand("analyze", "Per-parameter and per-phoneme improvement");
    analyze->add_option("--enhanced", in_path)->required();
    analyze->add_option("--baseline", baseline_dir)->required();
    analyze->add_option("--clean", clean_dir)->required();
    analyze->add_option("--alignments", alignments_dir)->required();
    analyze->add_option("--out", out_path)->required();
    analyze->add_option("--plot-data", plot_data_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (mix->parsed())
            return run_mix(clean_path, noise_path, snr_db, out_path);
        if (extract->parsed())
            return run_extract(in_path, out_path, backend, weights_path, spec);
        if (align->parsed())
            return run_align_ingest(in_path, n_frames, out_path, spec);
        if (fit->parsed())
            return run_fit_weights(features_dir, logits_dir, lambda, out_path);
        if (loss->parsed())
            return run_loss(enhanced_path, clean_path, alignment_path,
                            weights_path, weight_mode, aux_scale, backend,
                            est_weights_path, spec);
        if (analyze->parsed())
            return run_analyze(in_path, baseline_dir, clean_dir, alignments_dir,
                               out_path, plot_data_dir, spec);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
