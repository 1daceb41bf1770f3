#include "uqseg/predictor.hpp"

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "uqseg/npy.hpp"

extern char **environ;

namespace uqseg {

namespace fs = std::filesystem;

namespace {

std::mutex &stateful_call_mutex() {
  static std::mutex m;
  return m;
}

fs::path handoff_root() {
  if (const char *dir = std::getenv("UQSEG_TMPDIR"); dir && *dir)
    return fs::path(dir);
  return fs::temp_directory_path();
}

// Owns the per-call handoff directory.
class HandoffDir {
public:
  explicit HandoffDir(std::uint64_t seed) {
    static std::atomic<std::uint64_t> counter{0};
    const fs::path root = handoff_root();
    for (int attempt = 0; attempt < 100; ++attempt) {
      path_ = root / ("uqseg-" + std::to_string(::getpid()) + "-" +
                      std::to_string(counter.fetch_add(1)) + "-" + std::to_string(seed));
      std::error_code ec;
      if (fs::create_directories(path_, ec))
        return;
      if (ec)
        throw IoError("cannot create handoff directory '" + path_.string() +
                      "': " + ec.message());
    }
    throw IoError("cannot create a unique handoff directory under '" + root.string() + "'");
  }
  ~HandoffDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  HandoffDir(const HandoffDir &) = delete;
  HandoffDir &operator=(const HandoffDir &) = delete;

  const fs::path &path() const { return path_; }

private:
  fs::path path_;
};

std::string shell_quote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string read_text(const fs::path &path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
    text.pop_back();
  return text;
}

struct ExitStatus {
  bool timed_out = false;
  int code = 0;
  int signal = 0;
};

ExitStatus run_shell(const std::string &command, const fs::path &log_path,
                     std::chrono::seconds timeout) {
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  const std::string log = log_path.string();
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, log.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDERR_FILENO, STDOUT_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);

  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::string sh = "/bin/sh", dash_c = "-c", cmd = command;
  char *argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, &attr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0)
    throw PredictorError(PredictorError::Kind::launch,
                         "cannot launch predictor: " + std::string(std::strerror(rc)), "");

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto delay = std::chrono::microseconds(200);
  int status = 0;
  for (;;) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid)
      break;
    if (done < 0 && errno != EINTR)
      throw PredictorError(PredictorError::Kind::launch,
                           "waitpid failed: " + std::string(std::strerror(errno)), "");
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      return {true, 0, SIGKILL};
    }
    std::this_thread::sleep_for(delay);
    delay = std::min(delay * 2, std::chrono::microseconds(20000));
  }
  if (WIFEXITED(status))
    return {false, WEXITSTATUS(status), 0};
  return {false, -1, WIFSIGNALED(status) ? WTERMSIG(status) : 0};
}

void check_labels(const PredictorSpec &spec, const LabelMap &labels, const FloatImage &image,
                  const std::string &where) {
  if (labels.shape() != image.shape())
    throw PredictorError(PredictorError::Kind::malformed_output,
                         "predictor output " + where + " has shape " +
                             shape_string(labels.shape()) + ", expected " +
                             shape_string(image.shape()),
                         "");
  for (auto v : labels.data())
    if (v >= spec.num_classes)
      throw PredictorError(PredictorError::Kind::malformed_output,
                           "predictor output " + where + " contains label " +
                               std::to_string(v) + " >= class count " +
                               std::to_string(spec.num_classes),
                           "");
}

void check_probabilities(const FloatImage &probs, const FloatImage &image,
                         const std::string &where) {
  Shape expected = image.shape();
  expected.insert(expected.begin(), probs.shape().front());
  if (probs.shape() != expected || probs.shape().front() < 2)
    throw PredictorError(PredictorError::Kind::malformed_output,
                         "predictor output " + where + " has shape " +
                             shape_string(probs.shape()) +
                             ", expected (classes, " + shape_string(image.shape()).substr(1),
                         "");
  const std::size_t classes = probs.shape().front();
  const std::size_t pixels = image.size();
  const auto p = probs.data();
  for (std::size_t i = 0; i < pixels; ++i) {
    double sum = 0.0;
    for (std::size_t m = 0; m < classes; ++m)
      sum += p[m * pixels + i];
    if (!(std::abs(sum - 1.0) <= 1e-4))
      throw PredictorError(PredictorError::Kind::malformed_output,
                           "predictor output " + where + ": class probabilities at pixel " +
                               std::to_string(i) + " sum to " + std::to_string(sum),
                           "");
  }
}

} // namespace

std::string instantiate_command(std::string_view tmpl, const std::string &input,
                                const std::string &output, std::uint64_t seed) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl[pos] == '{') {
      const auto close = tmpl.find('}', pos);
      if (close != std::string_view::npos) {
        const auto key = tmpl.substr(pos + 1, close - pos - 1);
        if (key == "input" || key == "output" || key == "seed") {
          out += key == "input"    ? shell_quote(input)
                 : key == "output" ? shell_quote(output)
                                   : std::to_string(seed);
          pos = close + 1;
          continue;
        }
      }
    }
    out += tmpl[pos++];
  }
  return out;
}

Prediction run_external(const PredictorSpec &spec, const FloatImage &image, std::uint64_t seed) {
  HandoffDir dir(seed);
  const fs::path input = dir.path() / "input.npy";
  const fs::path output = dir.path() / "output.npy";
  const fs::path log = dir.path() / "stderr.txt";
  npy::write(Tensor(image), input);
  const std::string command = instantiate_command(spec.command, input.string(),
                                                  output.string(), seed);

  ExitStatus status;
  {
    std::unique_lock<std::mutex> lock(stateful_call_mutex(), std::defer_lock);
    if (!spec.stateless)
      lock.lock();
    status = run_shell(command, log, spec.timeout);
  }
  const std::string diagnostics = read_text(log);
  if (status.timed_out)
    throw PredictorError(PredictorError::Kind::timeout,
                         "predictor timed out after " + std::to_string(spec.timeout.count()) +
                             " s: " + command,
                         diagnostics);
  if (status.code != 0)
    throw PredictorError(PredictorError::Kind::exit_status,
                         "predictor exited with " +
                             (status.signal ? "signal " + std::to_string(status.signal)
                                            : "status " + std::to_string(status.code)) +
                             ": " + command,
                         diagnostics);
  if (!fs::exists(output))
    throw PredictorError(PredictorError::Kind::malformed_output,
                         "predictor wrote no output file " + output.string(), diagnostics);

  Tensor result;
  try {
    result = npy::read(output);
  } catch (const Error &e) {
    throw PredictorError(PredictorError::Kind::malformed_output,
                         "predictor output " + output.string() + ": " + e.what(), diagnostics);
  }
  const std::string where = "'" + output.filename().string() + "'";
  if (spec.output_kind == OutputKind::labels) {
    auto *labels = std::get_if<LabelMap>(&result);
    if (!labels)
      throw PredictorError(PredictorError::Kind::malformed_output,
                           "predictor output must be uint8 labels", diagnostics);
    check_labels(spec, *labels, image, where);
    labels->set_spacing(image.spacing());
    return std::move(*labels);
  }
  auto *probs = std::get_if<FloatImage>(&result);
  if (!probs)
    throw PredictorError(PredictorError::Kind::malformed_output,
                         "predictor output must be float32 probabilities", diagnostics);
  check_probabilities(*probs, image, where);
  return std::move(*probs);
}

} // namespace uqseg
