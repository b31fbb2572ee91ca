// Copyright 2026 The cpsflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cpsflow/remote.hpp"

#include <sys/socket.h>

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <map>

#include "cpsflow/error.hpp"
#include "net.hpp"

namespace cpsflow {

namespace {

const char* const kModule = "remote_learner";

constexpr std::chrono::milliseconds kPollInterval{50};
constexpr std::chrono::milliseconds kBusyHelloWait{250};

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, kModule, message);
}

std::string encode(const Json& message) {
  return message.dump(-1, ' ', false, Json::error_handler_t::replace);
}

void require_finite(const Dataset& data, const char* what) {
  for (const auto& [name, col] : data.columns()) {
    if (col.kind() == ValueKind::Float64) {
      for (double v : col.float64()) {
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, std::string(what) + " column '" + name + "' holds NaN or Inf");
      }
    } else if (col.kind() == ValueKind::FloatList) {
      for (const auto& items : col.float_list()) {
        for (double v : items) {
          if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, std::string(what) + " column '" + name + "' holds NaN or Inf");
        }
      }
    }
  }
}

Json error_response(const std::string& message) { return Json{{"kind", "error"}, {"message", message}}; }

const Json& field(const Json& message, const char* key) {
  auto it = message.find(key);
  if (it == message.end()) fail(ErrorCode::ProtocolError, std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

// --- client -----------------------------------------------------------------

RemoteSession::RemoteSession(RemoteOptions options)
    : options_(options), socket_(std::make_unique<net::Socket>()),
      reader_(std::make_unique<net::LineReader>(options.max_frame)), max_frame_(options.max_frame) {}

RemoteSession::~RemoteSession() = default;

std::shared_ptr<RemoteSession> RemoteSession::connect(const std::string& address, RemoteOptions options) {
  std::shared_ptr<RemoteSession> session(new RemoteSession(options));
  *session->socket_ = net::connect_to(net::parse_endpoint(address), options.timeout);

  Json ack;
  try {
    ack = session->exchange(encode(Json{{"kind", "hello"}, {"version", kProtocolVersion}}));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConnectionClosed) throw;
    fail(ErrorCode::ConnectFailed, std::string("connection dropped during hello: ") + e.what());
  }
  const auto kind = ack.value("kind", "");
  if (kind == "error") {
    const auto message = ack.value("message", "");
    const bool version = message.find("protocol version") != std::string::npos;
    fail(version ? ErrorCode::VersionMismatch : ErrorCode::ConnectFailed, "server rejected hello: " + message);
  }
  if (kind != "hello_ack") fail(ErrorCode::ProtocolError, "expected hello_ack, got '" + kind + "'");
  const int version = ack.value("version", 0);
  if (version != kProtocolVersion) {
    fail(ErrorCode::VersionMismatch, "server speaks protocol " + std::to_string(version) + ", client speaks " +
                                         std::to_string(kProtocolVersion));
  }
  session->server_version_ = version;
  session->max_frame_ = std::min(options.max_frame, ack.value("max_frame", options.max_frame));
  session->reader_->set_max_frame(session->max_frame_);
  return session;
}

bool RemoteSession::is_open() const {
  std::lock_guard lock(mutex_);
  return socket_->valid();
}

Json RemoteSession::exchange(const std::string& line) {
  std::lock_guard lock(mutex_);
  if (!socket_->valid()) fail(ErrorCode::ConnectionClosed, "session is closed");
  if (line.size() > max_frame_) {
    fail(ErrorCode::FrameTooLarge, "message of " + std::to_string(line.size()) + " bytes exceeds the " +
                                       std::to_string(max_frame_) + "-byte frame limit");
  }
  std::string framed = line;
  framed.push_back('\n');
  try {
    net::send_all(*socket_, framed);
  } catch (const Error&) {
    socket_->close();
    throw;
  }

  std::string response;
  switch (reader_->read_line(*socket_, options_.timeout, response)) {
    case net::ReadStatus::Line:
      break;
    case net::ReadStatus::TimedOut:
      // A late reply would desynchronize request/response pairing.
      socket_->close();
      fail(ErrorCode::Timeout, "no response within " + std::to_string(options_.timeout.count()) + " ms");
    case net::ReadStatus::Closed:
      socket_->close();
      fail(ErrorCode::ConnectionClosed, "server closed the connection");
    case net::ReadStatus::TooLarge:
      socket_->close();
      fail(ErrorCode::FrameTooLarge, "response exceeds the frame limit");
  }
  try {
    Json parsed = Json::parse(response);
    if (!parsed.is_object()) fail(ErrorCode::ProtocolError, "response is not a JSON object");
    return parsed;
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ProtocolError, std::string("malformed response: ") + e.what());
  }
}

Json RemoteSession::request_raw(const std::string& line) { return exchange(line); }

Json RemoteSession::request(const Json& message) {
  Json response = exchange(encode(message));
  if (response.value("kind", "") == "error") fail(ErrorCode::RemoteError, response.value("message", "remote error"));
  return response;
}

std::shared_ptr<const RemoteModel> RemoteSession::fit(const Dataset& inputs, const Dataset& outputs) {
  require_finite(inputs, "input");
  require_finite(outputs, "output");
  const Json response =
      request(Json{{"kind", "fit"}, {"inputs", dataset_to_json(inputs)}, {"outputs", dataset_to_json(outputs)}});
  if (response.value("kind", "") != "fit_ack") fail(ErrorCode::ProtocolError, "expected fit_ack");
  try {
    return std::make_shared<RemoteModel>(shared_from_this(), field(response, "model").get<std::string>(),
                                         inputs.schema(), outputs.schema());
  } catch (const Json::exception& e) {
    fail(ErrorCode::ProtocolError, std::string("bad fit_ack: ") + e.what());
  }
}

Dataset RemoteSession::predict(const std::string& model_id, const Schema& output_schema, const Dataset& inputs) {
  require_finite(inputs, "input");
  const Json response =
      request(Json{{"kind", "predict"}, {"model", model_id}, {"inputs", dataset_to_json(inputs)}});
  if (response.value("kind", "") != "prediction") fail(ErrorCode::ProtocolError, "expected prediction");
  Dataset outputs;
  try {
    outputs = dataset_from_json(field(response, "outputs"));
  } catch (const Error& e) {
    fail(ErrorCode::ProtocolError, std::string("bad prediction payload: ") + e.what());
  }
  if (outputs.column_count() != 1 || outputs.row_count() != inputs.row_count()) {
    fail(ErrorCode::ProtocolError, "prediction is not one column row-aligned with the inputs");
  }
  const std::string name = output_schema.empty() ? outputs.name(0) : output_schema.front().name;
  return Dataset({{name, Column(outputs.column(0).to_float64())}}, inputs.row_count());
}

Json RemoteSession::save(const std::string& model_id) {
  const Json response = request(Json{{"kind", "save"}, {"model", model_id}});
  if (response.value("kind", "") != "saved") fail(ErrorCode::ProtocolError, "expected saved");
  return field(response, "document");
}

void RemoteSession::shutdown() {
  {
    std::lock_guard lock(mutex_);
    if (!socket_->valid()) return;
  }
  const Json response = exchange(encode(Json{{"kind", "shutdown"}}));
  std::lock_guard lock(mutex_);
  socket_->close();
  if (response.value("kind", "") == "error") fail(ErrorCode::RemoteError, response.value("message", ""));
}

RemoteModel::RemoteModel(std::shared_ptr<RemoteSession> session, std::string id, Schema input_schema,
                         Schema output_schema)
    : Model(std::move(input_schema), std::move(output_schema)), session_(std::move(session)), id_(std::move(id)) {}

Dataset RemoteModel::predict(const Dataset& inputs) const {
  checked_features(inputs);
  return session_->predict(id_, output_schema(), inputs);
}

std::vector<double> RemoteModel::predict_columns(const std::vector<std::vector<double>>& features,
                                                 std::size_t rows) const {
  std::vector<Dataset::Entry> columns;
  for (std::size_t c = 0; c < features.size(); ++c) columns.emplace_back(input_schema()[c].name, Column(features[c]));
  return session_->predict(id_, output_schema(), Dataset(std::move(columns), rows)).column(0).float64();
}

Json RemoteModel::params() const { return to_document().at("params"); }

Json RemoteModel::to_document() const { return session_->save(id_); }

std::shared_ptr<RemoteSession> connect(const std::string& address, RemoteOptions options) {
  return RemoteSession::connect(address, options);
}

std::shared_ptr<const RemoteModel> remote_fit(RemoteSession& session, const Dataset& inputs, const Dataset& outputs) {
  return session.fit(inputs, outputs);
}

Dataset remote_predict(const RemoteModel& model, const Dataset& inputs) { return model.predict(inputs); }

ModelPtr RemoteLearner::learn(const Dataset& inputs, const Dataset& outputs) const {
  return session_->fit(inputs, outputs);
}

// --- server -----------------------------------------------------------------

struct LearnerServer::SessionSlot {
  net::Socket socket;
  std::thread thread;
  std::atomic<bool> done{false};
};

struct LearnerServer::SessionState {
  bool greeted = false;
  std::size_t next_id = 1;
  std::map<std::string, ModelPtr> models;
};

LearnerServer::LearnerServer(std::shared_ptr<const OfflineLearner> learner, ServerOptions options)
    : learner_(std::move(learner)), options_(std::move(options)), listener_(std::make_unique<net::Socket>()) {
  if (!learner_) fail(ErrorCode::InvalidArgument, "server needs a learner");
  if (options_.max_sessions == 0) fail(ErrorCode::InvalidArgument, "max_sessions must be positive");
}

LearnerServer::~LearnerServer() { stop(); }

void LearnerServer::start() {
  const auto endpoint = net::parse_endpoint(options_.address);
  *listener_ = net::listen_on(endpoint);
  port_ = net::local_port(*listener_);
  host_ = endpoint.host.empty() ? "0.0.0.0" : endpoint.host;
  stopping_ = false;
  acceptor_ = std::thread([this] { accept_loop(); });
}

std::string LearnerServer::address() const { return host_ + ":" + std::to_string(port_); }

void LearnerServer::stop() {
  std::lock_guard stop_lock(stop_mutex_);
  stopping_ = true;
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::shared_ptr<SessionSlot>> sessions;
  {
    std::lock_guard lock(sessions_mutex_);
    sessions.swap(sessions_);
  }
  for (auto& s : sessions) s->socket.shutdown();
  for (auto& s : sessions) {
    if (s->thread.joinable()) s->thread.join();
  }
  listener_->close();
}

void LearnerServer::wait() {
  while (!stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void LearnerServer::reap_finished() {
  std::lock_guard lock(sessions_mutex_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if ((*it)->done) {
      if ((*it)->thread.joinable()) (*it)->thread.join();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

void LearnerServer::accept_loop() {
  while (!stopping_) {
    if (!net::wait_readable(*listener_, kPollInterval)) {
      reap_finished();
      continue;
    }
    net::Socket client(::accept4(listener_->fd(), nullptr, nullptr, SOCK_CLOEXEC));
    if (!client.valid()) continue;
    reap_finished();
    if (active_.load() >= options_.max_sessions) {
      // Consume the hello first: closing with unread input resets the
      // connection and can drop the reply before the client reads it.
      net::LineReader hello(options_.max_frame);
      std::string ignored;
      hello.read_line(client, kBusyHelloWait, ignored);
      try {
        net::send_all(client, encode(error_response("server busy: session limit reached")) + "\n");
      } catch (const Error&) {
      }
      ::shutdown(client.fd(), SHUT_WR);
      net::wait_readable(client, kBusyHelloWait);
      continue;
    }
    auto slot = std::make_shared<SessionSlot>();
    slot->socket = std::move(client);
    ++active_;
    ++served_;
    std::lock_guard lock(sessions_mutex_);
    sessions_.push_back(slot);
    slot->thread = std::thread([this, slot] { run_session(slot); });
  }
}

void LearnerServer::run_session(std::shared_ptr<SessionSlot> slot) {
  net::LineReader reader(options_.max_frame);
  SessionState state;
  std::string line;
  bool open = true;
  while (open && !stopping_) {
    const auto status = reader.read_line(slot->socket, kPollInterval * 2, line);
    if (status == net::ReadStatus::TimedOut) continue;
    if (status == net::ReadStatus::Closed) break;
    std::string response;
    bool close_after = false;
    if (status == net::ReadStatus::TooLarge) {
      response = encode(error_response("frame exceeds " + std::to_string(options_.max_frame) + " bytes"));
    } else {
      response = handle(line, state, close_after);
    }
    try {
      net::send_all(slot->socket, response + "\n");
    } catch (const Error&) {
      break;
    }
    open = !close_after;
  }
  slot->socket.shutdown();
  --active_;
  slot->done = true;
}

std::string LearnerServer::handle(const std::string& line, SessionState& state, bool& close_after) {
  Json request;
  try {
    request = Json::parse(line);
  } catch (const Json::parse_error& e) {
    return encode(error_response(std::string("malformed JSON: ") + e.what()));
  }
  if (!request.is_object() || !request.contains("kind") || !request.at("kind").is_string()) {
    return encode(error_response("request must be an object with a string 'kind'"));
  }

  try {
    const auto kind = request.at("kind").get<std::string>();
    if (kind == "hello") {
      const auto& version = field(request, "version");
      if (!version.is_number_integer() || version.get<int>() != kProtocolVersion) {
        return encode(error_response("unsupported protocol version " + version.dump() + "; server speaks " +
                                     std::to_string(kProtocolVersion)));
      }
      state.greeted = true;
      return encode(Json{{"kind", "hello_ack"}, {"version", kProtocolVersion}, {"max_frame", options_.max_frame}});
    }
    if (!state.greeted) return encode(error_response("hello required before '" + kind + "'"));

    if (kind == "fit") {
      const Dataset inputs = dataset_from_json(field(request, "inputs"));
      const Dataset outputs = dataset_from_json(field(request, "outputs"));
      if (inputs.row_count() != outputs.row_count()) {
        return encode(error_response("row count mismatch: inputs " + std::to_string(inputs.row_count()) +
                                     ", outputs " + std::to_string(outputs.row_count())));
      }
      ModelPtr model = learner_->learn(inputs, outputs);
      const std::string id = "m" + std::to_string(state.next_id++);
      state.models.emplace(id, std::move(model));
      return encode(Json{{"kind", "fit_ack"}, {"model", id}});
    }
    if (kind == "predict" || kind == "save") {
      const auto id = field(request, "model").get<std::string>();
      const auto it = state.models.find(id);
      if (it == state.models.end()) return encode(error_response("unknown model '" + id + "'"));
      if (kind == "save") return encode(Json{{"kind", "saved"}, {"model", id}, {"document", it->second->to_document()}});
      const Dataset predictions = it->second->predict(dataset_from_json(field(request, "inputs")));
      for (double v : predictions.column(0).to_float64()) {
        if (!std::isfinite(v)) return encode(error_response("model produced a non-finite prediction"));
      }
      return encode(Json{{"kind", "prediction"}, {"model", id}, {"outputs", dataset_to_json(predictions)}});
    }
    if (kind == "shutdown") {
      close_after = true;
      return encode(Json{{"kind", "shutdown_ack"}});
    }
    return encode(error_response("unknown request kind '" + kind + "'"));
  } catch (const Error& e) {
    return encode(error_response(std::string(to_string(e.code())) + ": " + e.what()));
  } catch (const std::exception& e) {
    return encode(error_response(e.what()));
  }
}

std::unique_ptr<LearnerServer> serve(std::shared_ptr<const OfflineLearner> learner, const std::string& address,
                                     std::size_t max_sessions) {
  auto server = std::make_unique<LearnerServer>(std::move(learner), ServerOptions{address, max_sessions});
  server->start();
  return server;
}

}  // namespace cpsflow
