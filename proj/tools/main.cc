#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "experiments.h"
#include "sectrain/common/errors.h"
#include "sectrain/he/params.h"
#include "sectrain/he/scheme.h"
#include "sectrain/linprot/server.h"
#include "sectrain/linprot/session.h"
#include "sectrain/train/fixed.h"
#include "sectrain/transport/socket_channel.h"

#ifndef SECTRAIN_DATA_DIR
#define SECTRAIN_DATA_DIR "data"
#endif

namespace {

using namespace sectrain;

struct Options {
  std::string command;
  std::string scheme = "correlated";
  std::string protocol = "precompute";
  std::string backend = "rlwe";
  std::string engine = "secure";
  uint32_t n = 4096;
  int bitwidth = 32;
  int scale = 12;
  uint64_t seed = 1;
  std::string out;
  std::string host = "127.0.0.1";
  int port = 0;
  double bandwidth_mbps = 400;
  double ping_ms = 0.5;
  bool delay = false;
  std::string sweep = "all";
  int channels = 1;
  int trials = 100;
  std::string model;
  std::string images = std::string(SECTRAIN_DATA_DIR) + "/mnist1k-images-idx3-ubyte";
  std::string labels = std::string(SECTRAIN_DATA_DIR) + "/mnist1k-labels-idx1-ubyte";
  size_t synthetic = 0;
  size_t samples = 0;
  int epochs = 1;
  int batch = 8;
  double lr = 1.0 / 64;
  bool check_reference = false;
};

// Writes to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ParameterError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

bool WantsJson(const std::string& path) {
  return path.size() > 5 && path.substr(path.size() - 5) == ".json";
}

train::ModelSpec LoadModel(const Options& o) {
  train::ModelSpec spec = o.model.empty() ? train::TwoConvSpec(o.seed) : train::LoadModelSpec(o.model);
  return spec;
}

train::Dataset LoadData(const Options& o, const train::ModelSpec& spec, size_t fallback) {
  if (o.synthetic > 0) {
    return train::SyntheticDataset(o.synthetic, spec.input.h, spec.input.w, spec.classes, o.seed);
  }
  if (!std::filesystem::exists(o.images)) {
    std::cerr << "warning: " << o.images << " not found; using synthetic data\n";
    return train::SyntheticDataset(fallback, spec.input.h, spec.input.w, spec.classes, o.seed);
  }
  return train::LoadIdx(o.images, o.labels, o.samples);
}

cli::SecureRunConfig RunConfig(const Options& o) {
  cli::SecureRunConfig c;
  c.backend = he::ParseBackend(o.backend);
  c.n = o.n;
  c.layout = packing::ParseLayout(o.scheme);
  c.model = LoadModel(o);
  c.samples = o.samples ? o.samples : size_t(o.batch);
  c.data = o.synthetic > 0 || !o.images.empty() ? LoadData(o, c.model, c.samples) : train::Dataset{};
  c.train = {o.batch, train::ToFixed(o.lr, o.scale)};
  c.scale = o.scale;
  c.bits = o.bitwidth;
  c.seed = o.seed;
  c.link = {o.bandwidth_mbps, o.ping_ms};
  c.delay = o.delay;
  return c;
}

int RunCountsCommand(const Options& o) {
  std::vector<std::string> warnings;
  const auto rows = cli::RunCounts(o.n, o.sweep, o.channels, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  Output out(o.out);
  if (WantsJson(o.out)) {
    cli::WriteCountsJson(out.stream(), rows);
  } else {
    cli::WriteCountsCsv(out.stream(), rows);
  }
  return 0;
}

int RunBenchCommand(const Options& o) {
  const auto r = cli::RunBenchHe(he::ParseBackend(o.backend), o.n, o.trials, o.seed);
  Output out(o.out);
  cli::WriteBenchHeCsv(out.stream(), r);
  return 0;
}

int RunAblateCommand(const Options& o) {
  const auto rows = cli::RunAblate(RunConfig(o));
  Output out(o.out);
  cli::WriteAblateCsv(out.stream(), rows);
  if (rows[0].final_weights != rows[1].final_weights) {
    std::cerr << "error: protocols produced different weights\n";
    return 1;
  }
  return 0;
}

int RunBreakdownCommand(const Options& o) {
  const auto rows = cli::RunBreakdown(RunConfig(o));
  Output out(o.out);
  cli::WriteBreakdownCsv(out.stream(), rows);
  return 0;
}

int RunServeCommand(const Options& o) {
  if (o.port <= 0 || o.port > 65535) throw ParameterError("serve needs --port");
  const auto scheme = he::MakeScheme(he::ParseBackend(o.backend), he::HeParams::Default(o.n));
  transport::SocketListener listener(uint16_t(o.port), o.host);
  std::cerr << "listening on " << o.host << ':' << listener.port() << '\n';
  auto channel = listener.Accept();
  he::OpMeter meter;
  linprot::ServerSession server(*channel, scheme, {MixSeed(o.seed), 7, o.bitwidth}, &meter);
  server.Serve();
  std::cerr << "online ccmul " << meter.count(he::OpKind::kCcMul, Phase::kOnline) << ", offline ccmul "
            << meter.count(he::OpKind::kCcMul, Phase::kOffline) << '\n';
  return 0;
}

int RunTrainCommand(const Options& o) {
  const train::ModelSpec spec = LoadModel(o);
  const train::Dataset data = LoadData(o, spec, o.samples ? o.samples : 64);
  const train::TrainConfig tc{o.batch, train::ToFixed(o.lr, o.scale)};
  train::Model model = train::InitModel(spec, o.scale, o.bitwidth);

  std::unique_ptr<linprot::LocalSession> session;
  std::unique_ptr<transport::Endpoint> socket;
  std::unique_ptr<linprot::Client> remote;
  std::unique_ptr<train::Engine> engine;
  const transport::Endpoint* channel = nullptr;
  const he::Backend backend = he::ParseBackend(o.backend);
  if (o.engine == "plain") {
    engine = std::make_unique<train::PlainEngine>(he::HeParams::Default(o.n).plain_modulus(), o.bitwidth);
  } else if (o.engine == "secure") {
    if (backend != he::Backend::kRlwe) {
      std::cerr << "warning: timing columns are not meaningful on the clear backend\n";
    }
    linprot::Client* client = nullptr;
    if (o.port > 0) {
      const auto scheme = he::MakeScheme(backend, he::HeParams::Default(o.n));
      socket = transport::ConnectSocket(o.host, uint16_t(o.port), 10000);
      remote = std::make_unique<linprot::Client>(*socket, scheme, scheme->KeyGen(o.seed),
                                                 linprot::ClientConfig{o.seed, 7, o.bitwidth});
      remote->Setup();
      client = remote.get();
      channel = socket.get();
    } else {
      linprot::SessionConfig sc;
      sc.backend = backend;
      sc.degree = o.n;
      sc.seed = o.seed;
      sc.share_bits = o.bitwidth;
      if (o.delay) sc.link = transport::LinkModel{o.bandwidth_mbps, o.ping_ms};
      session = std::make_unique<linprot::LocalSession>(sc);
      client = &session->client();
      channel = &session->client_channel();
    }
    engine = std::make_unique<train::SecureEngine>(*client, linprot::ParseProtocol(o.protocol),
                                                   packing::ParseLayout(o.scheme));
  } else {
    throw ParameterError("unknown engine: " + o.engine);
  }

  train::Trainer trainer(model, *engine, tc, channel);
  Output out(o.out);
  train::WriteMetricsHeader(out.stream());
  for (int e = 0; e < o.epochs; ++e) {
    const auto m = trainer.TrainEpoch(data, e + 1);
    train::WriteMetricsRow(out.stream(), m);
    out.stream().flush();
  }
  if (remote) remote->Finish();
  if (session) session->Stop();

  if (o.check_reference && o.engine == "secure") {
    train::Model ref = train::InitModel(spec, o.scale, o.bitwidth);
    train::PlainEngine pe(he::HeParams::Default(o.n).plain_modulus(), o.bitwidth);
    train::Trainer rt(ref, pe, tc);
    for (int e = 0; e < o.epochs; ++e) rt.TrainEpoch(data, e + 1);
    const bool same = ref == model;
    std::cerr << "reference check: " << (same ? "identical weights" : "weights differ") << '\n';
    return same ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-party secure CNN training toolkit"};
  Options o;
  app.add_option("command,--command", o.command, "counts, bench-he, ablate, breakdown, train or serve")
      ->required()
      ->check(CLI::IsMember({"counts", "bench-he", "ablate", "breakdown", "train", "serve"}));
  app.add_option("--scheme", o.scheme, "convolution packing")->check(CLI::IsMember({"baseline", "correlated"}));
  app.add_option("--protocol", o.protocol, "linear protocol")->check(CLI::IsMember({"b", "precompute"}));
  app.add_option("--backend", o.backend, "HE backend")->check(CLI::IsMember({"clear", "rlwe"}));
  app.add_option("--engine", o.engine, "train: secure or plain")->check(CLI::IsMember({"secure", "plain"}));
  app.add_option("--n", o.n, "ring degree")->check(CLI::IsMember({1024, 2048, 4096, 8192, 16384}));
  app.add_option("--bitwidth", o.bitwidth, "share and activation bit width")->check(CLI::Range(8, 62));
  app.add_option("--scale", o.scale, "fixed-point fractional bits")->check(CLI::Range(0, 30));
  app.add_option("--seed", o.seed);
  app.add_option("--out", o.out, "output file (.json for JSON where supported)");
  app.add_option("--host", o.host);
  app.add_option("--port", o.port, "serve: listen port; train: connect to a server")->check(CLI::Range(0, 65535));
  app.add_option("--bandwidth-mbps", o.bandwidth_mbps)->check(CLI::PositiveNumber);
  app.add_option("--ping-ms", o.ping_ms)->check(CLI::NonNegativeNumber);
  app.add_flag("--delay", o.delay, "apply the link model in real time on the in-process channel");
  app.add_option("--sweep", o.sweep, "counts: toy, input, kernel or all");
  app.add_option("--channels", o.channels, "counts: input and output channels")->check(CLI::PositiveNumber);
  app.add_option("--trials", o.trials, "bench-he trials")->check(CLI::PositiveNumber);
  app.add_option("--model", o.model, "model spec JSON");
  app.add_option("--images", o.images, "IDX image file");
  app.add_option("--labels", o.labels, "IDX label file");
  app.add_option("--synthetic", o.synthetic, "use this many synthetic samples");
  app.add_option("--samples", o.samples, "limit the number of samples");
  app.add_option("--epochs", o.epochs)->check(CLI::PositiveNumber);
  app.add_option("--batch", o.batch)->check(CLI::PositiveNumber);
  app.add_option("--lr", o.lr)->check(CLI::NonNegativeNumber);
  app.add_flag("--check-reference", o.check_reference, "train: compare with the plaintext reference");
  CLI11_PARSE(app, argc, argv);

  try {
    if (o.command == "counts") return RunCountsCommand(o);
    if (o.command == "bench-he") return RunBenchCommand(o);
    if (o.command == "ablate") return RunAblateCommand(o);
    if (o.command == "breakdown") return RunBreakdownCommand(o);
    if (o.command == "train") return RunTrainCommand(o);
    return RunServeCommand(o);
  } catch (const sectrain::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
