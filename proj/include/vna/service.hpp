// Copyright 2026 The vna Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Interactive analysis backend. Sessions live on disk:
//
//   <data>/index.json                     {"sessions": [id, ...]}
//   <data>/sessions/<id>/session.json     metadata, transcript, spec, job state
//   <data>/sessions/<id>/original.<ext>   uploaded media
//   <data>/sessions/<id>/gen/<n>/         one immutable directory per generation
//       noisy.mkv        lossless analysis copy
//       preview.mp4      browser-playable copy (preview.m4a for audio-only)
//       compare-<predictor>.json
//
// The HTTP routes are thin wrappers over the Service methods, which tests
// call directly.

#ifndef VNA_SERVICE_HPP
#define VNA_SERVICE_HPP

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "vna/error.hpp"
#include "vna/evaluation.hpp"
#include "vna/text.hpp"

namespace httplib {
class Server;
}

namespace vna::service {

struct ProxyFeatures {
  /// Audio windows are one video frame long when the clip has video, else
  /// kDefaultWindowS.
  double window_s = 0.0;
  std::vector<double> audio_rms;
  std::vector<double> audio_centroid_hz;
  double fps = 0.0;
  std::vector<double> video_luma;
  std::vector<double> video_edge;
  std::vector<std::string> tokens;
};

inline constexpr double kDefaultWindowS = 0.04;

/// RMS and power-weighted spectral centroid (Hann window) per audio window;
/// mean BT.601 luma and mean squared Sobel magnitude of luma per frame.
ProxyFeatures extract_proxy_features(const std::filesystem::path& media,
                                     const std::optional<text::Transcript>& transcript = std::nullopt);
nlohmann::json to_json(const ProxyFeatures& f);

struct ServiceOptions {
  std::filesystem::path data_dir = "vna-data";
  unsigned workers = 1;
  std::map<std::string, eval::PredictorSpec> predictors;
  std::optional<std::filesystem::path> static_dir;
  std::optional<std::filesystem::path> assets;
};

/// Loads {"predictors": [PredictorSpec JSON, ...]}.
std::map<std::string, eval::PredictorSpec> load_predictor_registry(const std::filesystem::path& path);

/// Maps an error code to its HTTP status.
int http_status(ErrorCode code);

class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Stores the upload, probes it, and creates a session. `alignment` is an
  /// optional transcript JSON.
  nlohmann::json create_session(const std::string& filename, const std::string& bytes,
                                const std::optional<std::string>& alignment = std::nullopt);
  nlohmann::json get_session(const std::string& id) const;
  nlohmann::json list_sessions() const;
  nlohmann::json put_transcript(const std::string& id, const std::string& body);
  /// Body is a NoiseSpec or a random-generation recipe.
  nlohmann::json put_noise(const std::string& id, const std::string& body);
  /// Queues a generation of the current spec; replaces a queued, not yet
  /// running job of the same session.
  nlohmann::json generate(const std::string& id);
  nlohmann::json status(const std::string& id) const;
  /// Path of the latest finished artifact; `lossless` selects noisy.mkv.
  std::filesystem::path preview_path(const std::string& id, bool lossless = false) const;
  std::filesystem::path original_path(const std::string& id) const;
  nlohmann::json compare(const std::string& id, const std::string& predictor, const std::string& denoiser = {});

  /// Blocks until the session has no queued or running job.
  void wait_idle(const std::string& id) const;

  /// Registers all routes on `server`.
  void mount(httplib::Server& server);

 private:
  struct Session;
  struct Job {
    std::string session;
    std::uint64_t seq = 0;
  };

  Session& find(const std::string& id) const;
  void persist(const Session& s) const;
  void drop_comparisons(const std::string& id) const;
  void persist_index() const;
  nlohmann::json view(const Session& s) const;
  void worker_loop();
  void run_job(const Job& job);
  std::filesystem::path session_dir(const std::string& id) const;

  ServiceOptions options_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::deque<Job> queue_;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace vna::service

#endif  // VNA_SERVICE_HPP
