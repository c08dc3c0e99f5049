#include "experiments.h"

#include <algorithm>
#include <chrono>
#include <iomanip>

#include "sectrain/common/errors.h"
#include "sectrain/common/prng.h"
#include "sectrain/he/evaluator.h"
#include "sectrain/he/params.h"
#include "sectrain/linprot/session.h"
#include "sectrain/train/engine.h"

namespace sectrain::cli {

namespace {

using Clock = std::chrono::steady_clock;

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

void RequireTiming(he::Backend backend) {
  if (backend != he::Backend::kRlwe) {
    throw ParameterError("timing commands need the rlwe backend");
  }
}

uint64_t OnlineBytes(const transport::CommReport& r) {
  return r.total_bytes(Phase::kOnline) + r.total_bytes(Phase::kNonlinear);
}

transport::CommReport OnlyPhases(const transport::CommReport& r, std::initializer_list<Phase> keep) {
  transport::CommReport out;
  for (Phase p : keep) out.phases[int(p)] = r.at(p);
  return out;
}

}  // namespace

std::vector<CountRow> RunCounts(uint32_t n, const std::string& sweep, int channels,
                                std::vector<std::string>* warnings) {
  struct Item {
    std::string sweep;
    packing::ConvShape shape;
    uint32_t capacity;
  };
  std::vector<Item> items;
  const bool all = sweep == "all";
  if (!all && sweep != "toy" && sweep != "input" && sweep != "kernel") {
    throw ParameterError("unknown sweep: " + sweep);
  }
  if (all || sweep == "toy") items.push_back({"toy", {2, 2, 2, 1}, 9});
  if (all || sweep == "input") {
    for (int H = 8; H <= 64; H += 8) items.push_back({"input", {H, H, 5, 2}, n});
  }
  if (all || sweep == "kernel") {
    for (int h = 3; h <= 11; h += 2) items.push_back({"kernel", {64, 64, h, (h - 1) / 2}, n});
  }
  std::vector<CountRow> rows;
  for (const auto& it : items) {
    // The toy row is the single-channel example.
    const int c = it.sweep == "toy" ? 1 : channels;
    try {
      CountRow r{it.sweep, it.shape, c, it.capacity,
                 packing::Count(it.shape, it.capacity, packing::Layout::kBaseline, c, c),
                 packing::Count(it.shape, it.capacity, packing::Layout::kCorrelated, c, c)};
      rows.push_back(std::move(r));
    } catch (const Error& e) {
      if (warnings) {
        warnings->push_back("skipped " + it.sweep + " H=" + std::to_string(it.shape.H) +
                            " h=" + std::to_string(it.shape.h) + ": " + e.what());
      }
    }
  }
  return rows;
}

void WriteCountsCsv(std::ostream& out, const std::vector<CountRow>& rows) {
  out << "sweep,H,W,h,pad,channels,capacity,baseline_mults,correlated_mults,ratio,"
         "baseline_max_degree,correlated_max_degree,baseline_tiled,correlated_tiled\n";
  for (const auto& r : rows) {
    out << r.sweep << ',' << r.shape.H << ',' << r.shape.W << ',' << r.shape.h << ',' << r.shape.pad
        << ',' << r.channels << ',' << r.capacity << ',' << r.baseline.mults << ','
        << r.correlated.mults << ',' << std::setprecision(6) << r.ratio() << ','
        << r.baseline.max_degree << ',' << r.correlated.max_degree << ',' << r.baseline.tiled << ','
        << r.correlated.tiled << '\n';
  }
}

void WriteCountsJson(std::ostream& out, const std::vector<CountRow>& rows) {
  out << "[\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << "  {\"sweep\": \"" << r.sweep << "\", \"H\": " << r.shape.H << ", \"W\": " << r.shape.W
        << ", \"h\": " << r.shape.h << ", \"pad\": " << r.shape.pad << ", \"channels\": " << r.channels
        << ", \"capacity\": " << r.capacity << ", \"ratio\": " << r.ratio()
        << ",\n   \"baseline\": " << r.baseline.ToJson() << ",\n   \"correlated\": " << r.correlated.ToJson()
        << "}" << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  out << "]\n";
}

BenchHeResult RunBenchHe(he::Backend backend, uint32_t n, int trials, uint64_t seed) {
  RequireTiming(backend);
  if (trials < 1) throw ParameterError("trials must be positive");
  const auto params = he::HeParams::Default(n);
  const auto scheme = he::MakeScheme(backend, params);
  he::Evaluator ev(scheme, scheme->KeyGen(seed), nullptr, MixSeed(seed));
  Prng rng(seed, {0x62656e6368});
  auto random_plain = [&] {
    std::vector<uint64_t> c(n);
    for (auto& v : c) v = rng.Uniform(params.plain_modulus());
    return ring::RingElem::FromCoeffs(params.plain, c);
  };
  std::vector<double> cc, cp, add, pp, enc, dec;
  auto ms = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  for (int i = 0; i < trials; ++i) {
    const auto m1 = random_plain(), m2 = random_plain();
    auto t0 = Clock::now();
    const auto a = ev.Encrypt(m1);
    auto t1 = Clock::now();
    const auto b = ev.Encrypt(m2);
    auto t2 = Clock::now();
    const auto c1 = ev.CcMul(a, b);
    auto t3 = Clock::now();
    const auto c2 = ev.CpMul(a, m2);
    auto t4 = Clock::now();
    const auto c3 = ev.CcAdd(c1, c2);
    auto t5 = Clock::now();
    const auto p = ev.PpMul(m1, m2);
    auto t6 = Clock::now();
    const auto d = ev.Decrypt(c3);
    auto t7 = Clock::now();
    if (!(d == p + p)) throw ContractError("benchmark decryption mismatch");
    enc.push_back(ms(t0, t1));
    cc.push_back(ms(t2, t3));
    cp.push_back(ms(t3, t4));
    add.push_back(ms(t4, t5));
    pp.push_back(ms(t5, t6));
    dec.push_back(ms(t6, t7));
  }
  return {n, trials, Median(cc), Median(cp), Median(add), Median(pp), Median(enc), Median(dec)};
}

void WriteBenchHeCsv(std::ostream& out, const BenchHeResult& r) {
  out << "n,trials,cc_mul_ms,cp_mul_ms,cc_add_ms,pp_mul_ms,encrypt_ms,decrypt_ms,cc_cp_ratio\n"
      << r.n << ',' << r.trials << ',' << std::setprecision(6) << r.cc_mul << ',' << r.cp_mul << ','
      << r.cc_add << ',' << r.pp_mul << ',' << r.encrypt << ',' << r.decrypt << ',' << r.ratio() << '\n';
}

train::Dataset ResolveData(const SecureRunConfig& config) {
  if (config.data.size() > 0) return config.data.Slice(0, config.samples);
  const auto& in = config.model.input;
  if (in.c != 1) throw ParameterError("synthetic data is single-channel");
  return train::SyntheticDataset(config.samples, in.h, in.w, config.model.classes, config.seed);
}

namespace {

struct SecurePass {
  AblateRow row;
  std::map<int, train::Engine::LayerCost> layers;
};

SecurePass RunSecurePass(const SecureRunConfig& config, linprot::Protocol protocol) {
  RequireTiming(config.backend);
  linprot::SessionConfig sc;
  sc.backend = config.backend;
  sc.degree = config.n;
  sc.seed = config.seed;
  sc.share_bits = config.bits;
  if (config.delay) sc.link = config.link;
  linprot::LocalSession session(sc);
  const train::Dataset data = ResolveData(config);
  train::Model model = train::InitModel(config.model, config.scale, config.bits);
  train::SecureEngine engine(session.client(), protocol, config.layout);
  train::Trainer trainer(model, engine, config.train, &session.client_channel());
  const auto before = session.client_channel().report();
  const auto m = trainer.TrainEpoch(data);
  const auto after = session.client_channel().report();
  session.Stop();

  SecurePass pass;
  AblateRow& r = pass.row;
  r.protocol = protocol;
  r.online_seconds = m.online_seconds;
  r.offline_seconds = m.offline_seconds;
  r.bytes_online = OnlineBytes(after) - OnlineBytes(before);
  r.bytes_offline = after.total_bytes(Phase::kOffline) - before.total_bytes(Phase::kOffline);
  r.online_network_seconds = transport::ModeledNetworkSeconds(
      OnlyPhases(after, {Phase::kOnline, Phase::kNonlinear}), config.link);
  r.offline_network_seconds =
      r.bytes_offline ? transport::ModeledNetworkSeconds(OnlyPhases(after, {Phase::kOffline}), config.link) : 0;
  r.online_cc_mul = session.server_meter().count(he::OpKind::kCcMul, Phase::kOnline);
  r.offline_cc_mul = session.server_meter().count(he::OpKind::kCcMul, Phase::kOffline);
  r.online_cp_mul = session.server_meter().count(he::OpKind::kCpMul, Phase::kOnline);
  for (const auto& p : model.params) {
    r.final_weights.insert(r.final_weights.end(), p.w.begin(), p.w.end());
    r.final_weights.insert(r.final_weights.end(), p.b.begin(), p.b.end());
  }
  pass.layers = engine.layer_costs();
  return pass;
}

}  // namespace

std::vector<AblateRow> RunAblate(const SecureRunConfig& config) {
  std::vector<AblateRow> rows;
  for (auto p : {linprot::Protocol::kDirect, linprot::Protocol::kPrecompute}) {
    rows.push_back(RunSecurePass(config, p).row);
  }
  return rows;
}

void WriteAblateCsv(std::ostream& out, const std::vector<AblateRow>& rows) {
  out << "protocol,online_seconds,online_network_seconds,online_total_seconds,offline_seconds,"
         "offline_network_seconds,bytes_online,bytes_offline,online_cc_mul,offline_cc_mul,online_cp_mul\n";
  for (const auto& r : rows) {
    out << linprot::ProtocolName(r.protocol) << ',' << std::setprecision(6) << r.online_seconds << ','
        << r.online_network_seconds << ',' << r.online_total() << ',' << r.offline_seconds << ','
        << r.offline_network_seconds << ',' << r.bytes_online << ',' << r.bytes_offline << ','
        << r.online_cc_mul << ',' << r.offline_cc_mul << ',' << r.online_cp_mul << '\n';
  }
}

std::vector<BreakdownRow> RunBreakdown(const SecureRunConfig& config) {
  std::vector<BreakdownRow> rows;
  for (auto p : {linprot::Protocol::kDirect, linprot::Protocol::kPrecompute}) {
    const auto pass = RunSecurePass(config, p);
    for (const auto& [layer, cost] : pass.layers) {
      if (layer < 0) continue;
      rows.push_back({p, layer, std::string(train::LayerKindName(config.model.layers.at(layer).kind)), cost});
    }
  }
  return rows;
}

void WriteBreakdownCsv(std::ostream& out, const std::vector<BreakdownRow>& rows) {
  out << "protocol,layer,kind,forward_seconds,backward_seconds,forward_bytes,backward_bytes\n";
  for (const auto& r : rows) {
    out << linprot::ProtocolName(r.protocol) << ',' << r.layer << ',' << r.kind << ','
        << std::setprecision(6) << r.cost.forward_seconds << ',' << r.cost.backward_seconds << ','
        << r.cost.forward_bytes << ',' << r.cost.backward_bytes << '\n';
  }
}

}  // namespace sectrain::cli
