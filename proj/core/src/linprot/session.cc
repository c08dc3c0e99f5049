#include "sectrain/linprot/session.h"

namespace sectrain::linprot {

LocalSession::LocalSession(const SessionConfig& config)
    : LocalSession(config, he::HeParams::Default(config.degree)) {}

LocalSession::LocalSession(const SessionConfig& config, const he::HeParams& params)
    : scheme_(he::MakeScheme(config.backend, params)),
      keys_(scheme_->KeyGen(config.seed)),
      pair_(transport::MakeMemoryChannel(config.link)) {
  server_ = std::make_unique<ServerSession>(
      *pair_.server, scheme_,
      ServerConfig{MixSeed(config.seed), config.dealer_seed, config.share_bits}, &server_meter_);
  client_ = std::make_unique<Client>(*pair_.client, scheme_, keys_,
                                     ClientConfig{config.seed, config.dealer_seed, config.share_bits},
                                     &client_meter_);
  thread_ = std::thread([this] {
    try {
      server_->Serve();
    } catch (...) {
      error_ = std::current_exception();
    }
  });
  try {
    client_->Setup();
  } catch (...) {
    pair_.client->Close();
    thread_.join();
    throw;
  }
}

LocalSession::~LocalSession() {
  try {
    Stop();
  } catch (...) {
  }
}

void LocalSession::Stop() {
  if (!thread_.joinable()) return;
  try {
    client_->Finish();
  } catch (...) {
    pair_.client->Close();
  }
  thread_.join();
  if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

}  // namespace sectrain::linprot
