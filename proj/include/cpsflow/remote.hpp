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

// Remote learner bridge: newline-delimited JSON over TCP.
//
// Every request line gets exactly one response line.
//
//   {"kind":"hello","version":1}
//     -> {"kind":"hello_ack","version":1,"max_frame":<bytes>}
//   {"kind":"fit","inputs":{col:[...]},"outputs":{col:[...]}}
//     -> {"kind":"fit_ack","model":"<id>"}
//   {"kind":"predict","model":"<id>","inputs":{col:[...]}}
//     -> {"kind":"prediction","model":"<id>","outputs":{col:[...]}}
//   {"kind":"save","model":"<id>"}
//     -> {"kind":"saved","model":"<id>","document":{<model file document>}}
//   {"kind":"shutdown"}
//     -> {"kind":"shutdown_ack"}, then the server closes the session
//
// Failures answer {"kind":"error","message":"..."} and leave the session
// usable. Column order inside "inputs"/"outputs" is significant.

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cpsflow/dataset.hpp"
#include "cpsflow/io.hpp"
#include "cpsflow/learners.hpp"
#include "cpsflow/models.hpp"

namespace cpsflow {

namespace net {
class Socket;
class LineReader;
}  // namespace net

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kDefaultMaxFrame = std::size_t{64} << 20;

struct RemoteOptions {
  std::chrono::milliseconds timeout{30000};
  std::size_t max_frame = kDefaultMaxFrame;
};

class RemoteModel;

/// Client side of one protocol session. Single owner; not for concurrent use
/// from several threads (calls are serialized internally).
class RemoteSession : public std::enable_shared_from_this<RemoteSession> {
 public:
  /// Connects and performs the hello exchange. Throws ConnectFailed,
  /// VersionMismatch or Timeout.
  static std::shared_ptr<RemoteSession> connect(const std::string& address, RemoteOptions options = {});

  ~RemoteSession();
  RemoteSession(const RemoteSession&) = delete;
  RemoteSession& operator=(const RemoteSession&) = delete;

  std::shared_ptr<const RemoteModel> fit(const Dataset& inputs, const Dataset& outputs);
  Dataset predict(const std::string& model_id, const Schema& output_schema, const Dataset& inputs);
  Json save(const std::string& model_id);
  void shutdown();

  /// One raw request/response round trip. Error responses raise RemoteError.
  Json request(const Json& message);
  /// Sends an arbitrary line (no validation) and returns the raw response.
  Json request_raw(const std::string& line);

  int server_version() const { return server_version_; }
  std::size_t max_frame() const { return max_frame_; }
  bool is_open() const;

 private:
  explicit RemoteSession(RemoteOptions options);
  Json exchange(const std::string& line);

  RemoteOptions options_;
  std::unique_ptr<net::Socket> socket_;
  std::unique_ptr<net::LineReader> reader_;
  mutable std::mutex mutex_;
  int server_version_ = 0;
  std::size_t max_frame_ = kDefaultMaxFrame;
};

/// Model living on a learner server.
class RemoteModel final : public Model {
 public:
  RemoteModel(std::shared_ptr<RemoteSession> session, std::string id, Schema input_schema, Schema output_schema);

  std::string kind() const override { return "remote"; }
  Dataset predict(const Dataset& inputs) const override;
  /// Parameters of the server-side model.
  Json params() const override;
  /// The server-side model document, loadable without the server.
  Json to_document() const override;

  const std::string& id() const { return id_; }

 protected:
  std::vector<double> predict_columns(const std::vector<std::vector<double>>& features,
                                      std::size_t rows) const override;

 private:
  std::shared_ptr<RemoteSession> session_;
  std::string id_;
};

std::shared_ptr<RemoteSession> connect(const std::string& address, RemoteOptions options = {});
std::shared_ptr<const RemoteModel> remote_fit(RemoteSession& session, const Dataset& inputs, const Dataset& outputs);
Dataset remote_predict(const RemoteModel& model, const Dataset& inputs);

/// Offline learner that trains on a remote server.
class RemoteLearner final : public OfflineLearner {
 public:
  explicit RemoteLearner(std::shared_ptr<RemoteSession> session) : session_(std::move(session)) {}
  std::string name() const override { return "remote"; }
  ModelPtr learn(const Dataset& inputs, const Dataset& outputs) const override;

 private:
  std::shared_ptr<RemoteSession> session_;
};

struct ServerOptions {
  std::string address = "127.0.0.1:0";
  std::size_t max_sessions = 4;
  std::size_t max_frame = kDefaultMaxFrame;
};

/// Serves an offline learner. Sessions run on their own threads; requests
/// within a session are handled in order and models are private to the
/// session that trained them.
class LearnerServer {
 public:
  LearnerServer(std::shared_ptr<const OfflineLearner> learner, ServerOptions options = {});
  ~LearnerServer();
  LearnerServer(const LearnerServer&) = delete;
  LearnerServer& operator=(const LearnerServer&) = delete;

  /// Binds and starts accepting. Throws BindFailed.
  void start();
  /// Closes the listener and every open session, then joins all threads.
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

  std::uint16_t port() const { return port_; }
  std::string address() const;
  std::size_t active_sessions() const { return active_.load(); }
  std::size_t sessions_served() const { return served_.load(); }

 private:
  struct SessionSlot;
  struct SessionState;

  void accept_loop();
  void run_session(std::shared_ptr<SessionSlot> slot);
  std::string handle(const std::string& line, SessionState& state, bool& close_after);
  void reap_finished();

  std::shared_ptr<const OfflineLearner> learner_;
  ServerOptions options_;
  std::unique_ptr<net::Socket> listener_;
  std::uint16_t port_ = 0;
  std::string host_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> active_{0};
  std::atomic<std::size_t> served_{0};
  std::thread acceptor_;
  std::mutex sessions_mutex_;
  std::vector<std::shared_ptr<SessionSlot>> sessions_;
  std::mutex stop_mutex_;
};

std::unique_ptr<LearnerServer> serve(std::shared_ptr<const OfflineLearner> learner, const std::string& address,
                                     std::size_t max_sessions);

}  // namespace cpsflow
