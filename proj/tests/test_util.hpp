// Copyright 2026 The infohier Authors.
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

// Fixtures shared by the unit and acceptance suites.

#ifndef INFOHIER_TESTS_TEST_UTIL_HPP_
#define INFOHIER_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "httplib.h"
#include "json.hpp"

#include "infohier/core.hpp"

namespace infohier::testing {

// Where was Luke Prokopec born? Blackwood -> Caerphilly County Borough ->
// Wales -> United Kingdom.
inline QaItem example_a() {
  QaItem item;
  item.question = {"luke-prokopec-birthplace", "Where was Luke Prokopec born?"};
  item.hierarchy = AnswerHierarchy::from_groups(
      item.question.id, {{AnswerText::atomic("Blackwood")},
                         {AnswerText::atomic("Caerphilly County Borough")},
                         {AnswerText::atomic("Wales")},
                         {AnswerText::atomic("United Kingdom")}});
  return item;
}

// A local HTTP endpoint answering POSTs with `reply(request_json)`. The
// first `fail_first` requests get HTTP 500.
class StubServer {
 public:
  using Reply = std::function<std::string(const nlohmann::json&)>;

  explicit StubServer(Reply reply, int fail_first = 0,
                      std::chrono::milliseconds delay = std::chrono::milliseconds(0))
      : reply_(std::move(reply)), fail_first_(fail_first), delay_(delay) {
    server_.Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      {
        std::lock_guard<std::mutex> lock(mu_);
        max_in_flight_ = std::max(max_in_flight_, now);
        requests_.push_back(body);
      }
      if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
      if (calls_++ < fail_first_) {
        res.status = 500;
      } else {
        res.set_content(reply_(body), "application/json");
      }
      --in_flight_;
    });
    server_.new_task_queue = [] { return new httplib::ThreadPool(16); };
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/classify";
  }
  int calls() const { return calls_; }
  int max_in_flight() const {
    std::lock_guard<std::mutex> lock(mu_);
    return max_in_flight_;
  }
  std::vector<nlohmann::json> requests() const {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_;
  }

  static Reply label(std::string value) {
    return [value](const nlohmann::json&) { return nlohmann::json{{"label", value}}.dump(); };
  }

 private:
  Reply reply_;
  int fail_first_;
  std::chrono::milliseconds delay_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  mutable std::mutex mu_;
  int max_in_flight_ = 0;
  std::vector<nlohmann::json> requests_;
};

// Nothing listens on port 1.
inline constexpr const char* kUnreachableEndpoint = "http://127.0.0.1:1/classify";

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("infohier-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string file(const std::string& name) const { return (path_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(file(name), std::ios::binary) << content;
    return file(name);
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace infohier::testing

#endif  // INFOHIER_TESTS_TEST_UTIL_HPP_
