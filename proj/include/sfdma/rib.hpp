#pragma once

#include <string>
#include <vector>

#include "sfdma/channel.hpp"
#include "sfdma/channel_entropy.hpp"
#include "sfdma/dataset.hpp"
#include "sfdma/nn.hpp"

namespace sfdma::rib {

/// One TX/RX pair: encoder psi_i ending in a d-wide sign_ste bottleneck,
/// decoder theta_i consuming the 2d vector [re(yhat); im(yhat)] and ending
/// in a class softmax.
struct TransceiverPair {
    nn::NetworkParams encoder;
    nn::NetworkParams decoder;
    std::size_t d = 0;
    double lambda = 0.05;
    std::size_t index = 0;

    std::size_t classes() const { return decoder.out_dim(); }

    void validate() const {
        encoder.validate();
        decoder.validate();
        if (encoder.layers.back().kind != nn::LayerKind::sign_ste || encoder.out_dim() != d)
            throw ShapeError("pair: encoder must end in a d-wide sign_ste bottleneck");
        if (decoder.in_dim() != 2 * d) throw ShapeError("pair: decoder input width must be 2d");
        if (decoder.layers.back().kind != nn::LayerKind::softmax)
            throw ShapeError("pair: decoder must end in softmax");
    }
};

/// Default architecture: encoder in->hidden...->d with relu, sign_ste on
/// top; decoder 2d->hidden...->classes with relu, softmax on top.
inline TransceiverPair make_pair(std::size_t index, std::size_t in_dim, std::size_t d, std::size_t classes,
                                 double lambda, SeededRng& rng,
                                 const std::vector<std::size_t>& enc_hidden = {512, 256},
                                 const std::vector<std::size_t>& dec_hidden = {256, 128}) {
    TransceiverPair pair;
    pair.index = index;
    pair.d = d;
    pair.lambda = lambda;
    std::vector<std::size_t> enc_dims = {in_dim};
    enc_dims.insert(enc_dims.end(), enc_hidden.begin(), enc_hidden.end());
    enc_dims.push_back(d);
    pair.encoder = nn::make_network(nn::mlp_spec(enc_dims, nn::LayerKind::sign_ste), rng);
    std::vector<std::size_t> dec_dims = {2 * d};
    dec_dims.insert(dec_dims.end(), dec_hidden.begin(), dec_hidden.end());
    dec_dims.push_back(classes);
    pair.decoder = nn::make_network(nn::mlp_spec(dec_dims, nn::LayerKind::softmax), rng);
    pair.validate();
    return pair;
}

struct RibConfig {
    std::size_t users = 2;
    std::size_t batch = 32;       // V
    std::size_t noise_samples = 1;  // L
    std::size_t epochs = 3;       // T
    double train_snr_db = 5.0;
    chan::PowerAllocation powers;
    std::uint64_t seed = 0;
    nn::AdamConfig adam;
    double lr_decay = 1.0;  // multiplicative, applied per epoch
    std::size_t eval_samples = 2000;
    std::size_t eval_trials = 1;

    void validate() const {
        if (users < 1 || batch < 1 || noise_samples < 1 || epochs < 1) throw ConfigError("rib config: counts must be >= 1");
        if (powers.p.size() != users) throw ConfigError("rib config: one power per user");
        for (double p : powers.p)
            if (p < 0.0) throw ConfigError("rib config: negative power");
    }

    std::vector<double> noise_variances() const {
        std::vector<double> s2(users);
        for (std::size_t i = 0; i < users; ++i) s2[i] = powers.at(i) / chan::from_db(train_snr_db);
        return s2;
    }
};

/// The three summands of the Monte-Carlo loss, all in nats; hxs enters
/// the total with a minus sign.
struct RibLossTerms {
    double ce = 0.0;
    double hyx = 0.0;
    double hxs = 0.0;
    double total = 0.0;

    void finalize() { total = ce + hyx - hxs; }
};

struct EncodeResult {
    Tensor probs;  // V x d, sigma(logits)
    Tensor bits;   // V x d, in {-1, +1}
    std::vector<chan::ComplexBlock> symbols;
    nn::ForwardCache cache;
};

/// Encoder chain of Eqs. (6)-(11): logits -> probs/bits -> BPSK ->
/// power-normalized symbols. Per-row symbol blocks satisfy ||x||^2 = d.
inline EncodeResult encode(const TransceiverPair& pair, const Tensor& s, SeededRng& rng, nn::Mode mode) {
    EncodeResult out;
    out.bits = nn::forward(pair.encoder, s, rng, mode, &out.cache);
    out.probs = out.cache.sign_probs.back();
    out.probs.require_finite("encoder bit probabilities");
    const std::size_t V = s.rows();
    out.symbols.resize(V);
    std::vector<double> row(pair.d);
    for (std::size_t v = 0; v < V; ++v) {
        for (std::size_t r = 0; r < pair.d; ++r) row[r] = out.bits.at(v, r);
        out.symbols[v] = chan::normalize_power(chan::modulate_bpsk(row));
    }
    return out;
}

/// Stacks [re(yhat); im(yhat)] rows for the decoder.
inline Tensor decoder_input(const std::vector<chan::ComplexBlock>& yhat, std::size_t d) {
    Tensor in({yhat.size(), 2 * d});
    for (std::size_t v = 0; v < yhat.size(); ++v) {
        if (yhat[v].size() != d) throw ShapeError("decoder_input: block length mismatch");
        for (std::size_t r = 0; r < d; ++r) {
            in.at(v, r) = yhat[v][r].real();
            in.at(v, d + r) = yhat[v][r].imag();
        }
    }
    return in;
}

inline Tensor decode_batch(const TransceiverPair& pair, const Tensor& dec_in, nn::ForwardCache* cache = nullptr) {
    SeededRng unused(0);
    return nn::forward(pair.decoder, dec_in, unused, nn::Mode::eval, cache);
}

/// Class posterior for one equalized block.
inline std::vector<double> decode(const TransceiverPair& pair, const chan::ComplexBlock& yhat) {
    Tensor post = decode_batch(pair, decoder_input({yhat}, pair.d));
    return post.data;
}

struct Minibatch {
    Tensor s;                 // V x in_dim
    std::vector<int> labels;  // V
};

/// Everything one Monte-Carlo pass produces, kept so tests can replay the
/// exact noise and bits. Indexing: per_l[l].<field>[user].
struct RibForwardRecord {
    struct UserSlot {
        EncodeResult enc;
        std::vector<chan::ComplexBlock> noise;  // per sample v
        std::vector<chan::ComplexBlock> yhat;   // per sample v
        Tensor dec_in;                          // active users only
        Tensor posterior;                       // active users only
        nn::ForwardCache dec_cache;
    };
    struct PerL {
        std::vector<UserSlot> users;
    };
    std::vector<PerL> per_l;
    std::vector<RibLossTerms> terms;  // per user; only active entries are filled
};

/// Monte-Carlo forward pass of the loss in its three-term decomposition.
///
/// Draw order (part of the determinism contract): for each noise sample l,
/// first every user's encoder forward in user order (train mode consumes
/// one logistic draw per bit, row-major), then per sample v the noise
/// blocks in user order (one complex normal per dimension).
///
/// The channel-entropy term does not depend on (v, l) or on the realized
/// symbol (the conditional mixture is translation invariant), so the
/// (1/VL) average collapses to a single per-dimension sum.
inline RibForwardRecord rib_forward(const std::vector<TransceiverPair>& pairs, const std::vector<Minibatch>& batch,
                                    const chan::ChannelRealization& ch, const chan::PowerAllocation& pw,
                                    std::size_t L, nn::Mode mode, SeededRng& rng,
                                    const std::vector<bool>& active) {
    const std::size_t N = pairs.size();
    if (batch.size() != N || ch.users != N || pw.p.size() != N || active.size() != N)
        throw ShapeError("rib_forward: user count mismatch");
    const std::size_t V = batch[0].s.rows();
    const std::size_t d = pairs[0].d;
    for (const TransceiverPair& p : pairs)
        if (p.d != d) throw ShapeError("rib_forward: all pairs must share d");
    for (const Minibatch& b : batch)
        if (b.s.rows() != V) throw ShapeError("rib_forward: ragged batch");

    RibForwardRecord rec;
    rec.per_l.resize(L);
    rec.terms.assign(N, RibLossTerms{});

    for (std::size_t l = 0; l < L; ++l) {
        RibForwardRecord::PerL& slot = rec.per_l[l];
        slot.users.resize(N);
        for (std::size_t i = 0; i < N; ++i) slot.users[i].enc = encode(pairs[i], batch[i].s, rng, mode);

        for (std::size_t i = 0; i < N; ++i) {
            slot.users[i].noise.resize(V);
            slot.users[i].yhat.resize(V);
        }
        std::vector<chan::ComplexBlock> x_all(N);
        for (std::size_t v = 0; v < V; ++v) {
            auto noise_v = chan::sample_noise(ch, rng);
            for (std::size_t i = 0; i < N; ++i) x_all[i] = slot.users[i].enc.symbols[v];
            auto y = chan::apply_channel(x_all, ch, pw, noise_v);
            for (std::size_t i = 0; i < N; ++i) {
                slot.users[i].noise[v] = std::move(noise_v[i]);
                slot.users[i].yhat[v] = chan::equalize_zf(y[i], ch.g(i, i));
            }
        }

        for (std::size_t i = 0; i < N; ++i) {
            if (!active[i]) continue;
            RibForwardRecord::UserSlot& u = slot.users[i];
            u.dec_in = decoder_input(u.yhat, d);
            u.posterior = decode_batch(pairs[i], u.dec_in, &u.dec_cache);
            double ce = 0.0;
            for (std::size_t v = 0; v < V; ++v) {
                double p = u.posterior.at(v, static_cast<std::size_t>(batch[i].labels[v]));
                ce -= std::log(std::max(p, 1e-300));
            }
            rec.terms[i].ce += ce / static_cast<double>(V * L);
        }
    }

    for (std::size_t i = 0; i < N; ++i) {
        if (!active[i]) continue;
        const TransceiverPair& pair = pairs[i];
        double hy = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            std::vector<chan::InterfererCfg> cfg;
            for (std::size_t j = 0; j < N; ++j)
                if (j != i) cfg.push_back({pw.at(j), ch.g(i, j)[r]});
            hy += chan::cond_output_entropy(chan::cplx(1.0, 0.0), cfg, ch.noise_var[i]);
        }
        rec.terms[i].hyx = pair.lambda * hy;

        const Tensor& probs = rec.per_l[0].users[i].enc.probs;
        double hx = 0.0;
        for (double p : probs.data) hx += nn::binary_entropy(p);
        rec.terms[i].hxs = pair.lambda * hx / static_cast<double>(V);

        rec.terms[i].finalize();
        if (!std::isfinite(rec.terms[i].total)) throw DivergenceError("rib loss diverged (non-finite)");
    }
    return rec;
}

/// Loss terms for every user on one minibatch (Eq. 22 estimate with
/// sampled bottleneck bits and fresh noise from `rng`).
inline std::vector<RibLossTerms> rib_loss(const std::vector<TransceiverPair>& pairs,
                                          const std::vector<Minibatch>& batch, const chan::ChannelRealization& ch,
                                          const chan::PowerAllocation& pw, std::size_t L, SeededRng& rng) {
    std::vector<bool> all(pairs.size(), true);
    return rib_forward(pairs, batch, ch, pw, L, nn::Mode::train, rng, all).terms;
}

namespace detail {

inline void accumulate(std::vector<Tensor>& into, const std::vector<Tensor>& add) {
    if (into.empty()) {
        into = add;
        return;
    }
    for (std::size_t k = 0; k < into.size(); ++k)
        for (std::size_t q = 0; q < into[k].size(); ++q) into[k].data[q] += add[k].data[q];
}

}  // namespace detail

/// Gradient step for user i on an already computed forward record:
/// cross-entropy path through decoder, channel and straight-through
/// bottleneck, minus the lambda-weighted encoder-entropy path.
inline void train_step_user(std::size_t i, std::vector<TransceiverPair>& pairs, const std::vector<Minibatch>& batch,
                            const chan::PowerAllocation& pw, RibForwardRecord& rec, nn::AdamState& enc_state,
                            nn::AdamState& dec_state) {
    TransceiverPair& pair = pairs[i];
    const std::size_t V = batch[i].s.rows();
    const std::size_t L = rec.per_l.size();
    const std::size_t d = pair.d;
    const double sqrt_p = std::sqrt(pw.at(i));
    const double inv_vl = 1.0 / static_cast<double>(V * L);

    std::vector<Tensor> dec_dw, dec_db;
    Tensor d_bits({V, d});
    for (std::size_t l = 0; l < L; ++l) {
        RibForwardRecord::UserSlot& u = rec.per_l[l].users[i];
        // Fused softmax + cross-entropy gradient at the softmax input.
        Tensor d_logits = u.posterior;
        for (double& v : d_logits.data) v *= inv_vl;
        for (std::size_t v = 0; v < V; ++v)
            d_logits.at(v, static_cast<std::size_t>(batch[i].labels[v])) -= inv_vl;
        nn::Gradients g = nn::backward(pair.decoder, u.dec_cache, d_logits, /*skip_top_softmax=*/true);
        detail::accumulate(dec_dw, g.d_weights);
        detail::accumulate(dec_db, g.d_biases);
        // Only the real slots reach the encoder: d yhat_re / d bit = sqrt(p_i).
        for (std::size_t v = 0; v < V; ++v)
            for (std::size_t r = 0; r < d; ++r) d_bits.at(v, r) += sqrt_p * g.d_input.at(v, r);
    }

    // -lambda * (1/V) sum H(sigma(logit)): the straight-through layer maps
    // bit-space gradients onto its pre-activation unchanged, so the
    // logit-space entropy gradient can be summed in directly.
    const Tensor& probs = rec.per_l[0].users[i].enc.probs;
    const double ent_scale = -pair.lambda / static_cast<double>(V);
    for (std::size_t q = 0; q < d_bits.size(); ++q)
        d_bits.data[q] += ent_scale * nn::binary_entropy_dlogit(probs.data[q]);

    nn::Gradients enc_g = nn::backward(pair.encoder, rec.per_l[0].users[i].enc.cache, d_bits);

    nn::Gradients dec_g;
    dec_g.d_weights = std::move(dec_dw);
    dec_g.d_biases = std::move(dec_db);
    nn::adam_step(dec_state, pair.decoder, dec_g);
    nn::adam_step(enc_state, pair.encoder, enc_g);
}

/// Eval-mode accuracy per user: every user transmits the same test sample
/// simultaneously; gains and noise are redrawn for each sample and trial.
inline std::vector<double> evaluate_accuracy(const std::vector<TransceiverPair>& pairs,
                                             const io::LabeledDataset& dataset, double snr_db,
                                             const chan::PowerAllocation& pw, std::size_t trials, SeededRng& rng) {
    const std::size_t N = pairs.size();
    const std::size_t d = pairs[0].d;
    std::vector<double> sigma2(N);
    for (std::size_t i = 0; i < N; ++i) sigma2[i] = pw.at(i) / chan::from_db(snr_db);

    std::vector<std::size_t> correct(N, 0);
    const std::size_t chunk = 256;
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t begin = 0; begin < dataset.count(); begin += chunk) {
            std::size_t n = std::min(chunk, dataset.count() - begin);
            io::LabeledDataset part = dataset.slice(begin, n);
            std::vector<EncodeResult> enc(N);
            for (std::size_t i = 0; i < N; ++i) enc[i] = encode(pairs[i], part.samples, rng, nn::Mode::eval);
            std::vector<std::vector<chan::ComplexBlock>> yhat(N, std::vector<chan::ComplexBlock>(n));
            std::vector<chan::ComplexBlock> x_all(N);
            for (std::size_t v = 0; v < n; ++v) {
                chan::ChannelRealization ch = chan::sample_channel(N, d, sigma2, rng);
                for (std::size_t i = 0; i < N; ++i) x_all[i] = enc[i].symbols[v];
                auto y = chan::apply_channel(x_all, ch, pw, rng);
                for (std::size_t i = 0; i < N; ++i) yhat[i][v] = chan::equalize_zf(y[i], ch.g(i, i));
            }
            for (std::size_t i = 0; i < N; ++i) {
                Tensor post = decode_batch(pairs[i], decoder_input(yhat[i], d));
                for (std::size_t v = 0; v < n; ++v) {
                    std::size_t best = 0;
                    for (std::size_t c = 1; c < pairs[i].classes(); ++c)
                        if (post.at(v, c) > post.at(v, best)) best = c;
                    if (static_cast<int>(best) == part.labels[v]) ++correct[i];
                }
            }
        }
    }
    std::vector<double> acc(N);
    double total = static_cast<double>(trials * dataset.count());
    for (std::size_t i = 0; i < N; ++i) acc[i] = static_cast<double>(correct[i]) / total;
    return acc;
}

struct EpochMetrics {
    std::size_t epoch = 0;
    std::size_t user = 0;
    double ce = 0.0, hyx = 0.0, hxs = 0.0, total = 0.0;
    double accuracy = 0.0;
};

namespace detail {

inline Tensor gather_rows(const Tensor& src, const std::vector<std::size_t>& idx, std::size_t begin, std::size_t n) {
    std::size_t f = src.cols();
    Tensor out({n, f});
    for (std::size_t v = 0; v < n; ++v) {
        std::size_t row = idx[begin + v];
        std::copy(src.data.begin() + row * f, src.data.begin() + (row + 1) * f, out.data.begin() + v * f);
    }
    return out;
}

}  // namespace detail

/// Distributed alternating training: per epoch, each user in turn sees
/// fresh per-batch gains and noise, all users transmit, and only that
/// user's encoder/decoder are updated. Emits one metrics row per
/// (epoch, user) with loss terms averaged over its update batches and
/// eval accuracy after the epoch.
inline std::vector<EpochMetrics> train_distributed(std::vector<TransceiverPair>& pairs,
                                                   const std::vector<io::LabeledDataset>& train_sets,
                                                   const io::LabeledDataset& eval_set, const RibConfig& cfg) {
    cfg.validate();
    const std::size_t N = pairs.size();
    if (train_sets.size() != N || cfg.users != N) throw ConfigError("train: dataset/pair count mismatch");
    for (std::size_t i = 0; i < N; ++i) pairs[i].validate();

    const std::size_t V = cfg.batch;
    std::size_t batches = train_sets[0].count() / V;
    for (const auto& ds : train_sets) batches = std::min(batches, ds.count() / V);
    if (batches == 0) throw ConfigError("train: batch size exceeds dataset size");

    std::vector<double> sigma2 = cfg.noise_variances();
    SeededRng root(cfg.seed);
    SeededRng shuffle_rng = root.derive(0xDA7A);
    SeededRng train_rng = root.derive(0x7EA1);

    std::vector<nn::AdamState> enc_states, dec_states;
    for (const TransceiverPair& p : pairs) {
        enc_states.emplace_back(p.encoder, cfg.adam);
        dec_states.emplace_back(p.decoder, cfg.adam);
    }

    std::vector<EpochMetrics> log;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (epoch > 1 && cfg.lr_decay != 1.0) {
            for (std::size_t i = 0; i < N; ++i) {
                enc_states[i].cfg.lr *= cfg.lr_decay;
                dec_states[i].cfg.lr *= cfg.lr_decay;
            }
        }
        std::vector<EpochMetrics> rows(N);
        for (std::size_t i = 0; i < N; ++i) {
            std::vector<std::vector<std::size_t>> order(N);
            for (std::size_t j = 0; j < N; ++j) {
                order[j].resize(train_sets[j].count());
                for (std::size_t k = 0; k < order[j].size(); ++k) order[j][k] = k;
                for (std::size_t k = order[j].size(); k > 1; --k)
                    std::swap(order[j][k - 1], order[j][shuffle_rng.below(k)]);
            }
            RibLossTerms sum;
            std::vector<bool> active(N, false);
            active[i] = true;
            for (std::size_t b = 0; b < batches; ++b) {
                chan::ChannelRealization ch = chan::sample_channel(N, pairs[0].d, sigma2, train_rng);
                std::vector<Minibatch> batch(N);
                for (std::size_t j = 0; j < N; ++j) {
                    batch[j].s = detail::gather_rows(train_sets[j].samples, order[j], b * V, V);
                    batch[j].labels.resize(V);
                    for (std::size_t v = 0; v < V; ++v) batch[j].labels[v] = train_sets[j].labels[order[j][b * V + v]];
                }
                RibForwardRecord rec;
                try {
                    rec = rib_forward(pairs, batch, ch, cfg.powers, cfg.noise_samples, nn::Mode::train, train_rng,
                                      active);
                } catch (const DivergenceError& e) {
                    throw DivergenceError("train diverged at epoch " + std::to_string(epoch) + " user " +
                                          std::to_string(i) + " batch " + std::to_string(b) + ": " + e.what());
                }
                sum.ce += rec.terms[i].ce;
                sum.hyx += rec.terms[i].hyx;
                sum.hxs += rec.terms[i].hxs;
                train_step_user(i, pairs, batch, cfg.powers, rec, enc_states[i], dec_states[i]);
            }
            rows[i].epoch = epoch;
            rows[i].user = i;
            rows[i].ce = sum.ce / static_cast<double>(batches);
            rows[i].hyx = sum.hyx / static_cast<double>(batches);
            rows[i].hxs = sum.hxs / static_cast<double>(batches);
            rows[i].total = rows[i].ce + rows[i].hyx - rows[i].hxs;
        }
        io::LabeledDataset eval_part =
            eval_set.count() > cfg.eval_samples ? eval_set.slice(0, cfg.eval_samples) : eval_set;
        SeededRng eval_rng = root.derive(0xE7A1000ULL + epoch);
        std::vector<double> acc =
            evaluate_accuracy(pairs, eval_part, cfg.train_snr_db, cfg.powers, cfg.eval_trials, eval_rng);
        for (std::size_t i = 0; i < N; ++i) {
            rows[i].accuracy = acc[i];
            log.push_back(rows[i]);
        }
    }
    return log;
}

}  // namespace sfdma::rib
