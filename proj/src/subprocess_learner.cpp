#include "probagen/subprocess_learner.hpp"

#include <csignal>
#include <cstdio>
#include <mutex>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "probagen/errors.hpp"

namespace probagen {

class LearnerProcess {
 public:
  explicit LearnerProcess(const std::vector<std::string>& command) {
    if (command.empty()) throw ConfigError("learner command is empty");
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) throw Error("pipe() failed");
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      throw Error("pipe() failed");
    }
    pid_ = fork();
    if (pid_ < 0) throw Error("fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      std::vector<char*> argv;
      for (const auto& a : command) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_ = fdopen(to_child[1], "w");
    out_ = fdopen(from_child[0], "r");
    std::signal(SIGPIPE, SIG_IGN);
  }

  ~LearnerProcess() {
    if (in_) std::fclose(in_);
    if (out_) std::fclose(out_);
    int status = 0;
    if (pid_ > 0) waitpid(pid_, &status, 0);
  }

  LearnerProcess(const LearnerProcess&) = delete;
  LearnerProcess& operator=(const LearnerProcess&) = delete;

  nlohmann::json call(const nlohmann::json& request) {
    std::lock_guard lock(mu_);
    const std::string line = request.dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), in_) != line.size() || std::fflush(in_) != 0)
      throw Error("learner process closed its input");
    std::string reply;
    int c = 0;
    while ((c = std::fgetc(out_)) != EOF && c != '\n') reply.push_back(static_cast<char>(c));
    if (reply.empty()) throw Error("learner process exited without replying");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(reply);
    } catch (const nlohmann::json::parse_error&) {
      throw Error("learner process sent invalid JSON: " + reply);
    }
    if (j.contains("error")) throw Error("learner process error: " + j.at("error").dump());
    return j;
  }

 private:
  pid_t pid_ = -1;
  FILE* in_ = nullptr;
  FILE* out_ = nullptr;
  std::mutex mu_;
};

namespace {

class RemotePredictor final : public Predictor {
 public:
  RemotePredictor(std::shared_ptr<LearnerProcess> process, nlohmann::json model_id)
      : process_(std::move(process)), model_id_(std::move(model_id)) {}

  double predict(std::span<const double> features) const override {
    const auto reply = process_->call({{"op", "predict"},
                                       {"model_id", model_id_},
                                       {"vector", std::vector<double>(features.begin(), features.end())}});
    try {
      return reply.at("value").get<double>();
    } catch (const nlohmann::json::exception&) {
      throw Error("learner predict reply lacks a numeric 'value'");
    }
  }

 private:
  std::shared_ptr<LearnerProcess> process_;
  nlohmann::json model_id_;
};

}  // namespace

SubprocessLearner::SubprocessLearner(std::vector<std::string> command) : command_(std::move(command)) {
  if (command_.empty()) throw ConfigError("learner command is empty");
}

SubprocessLearner::~SubprocessLearner() = default;

std::unique_ptr<Predictor> SubprocessLearner::fit(const Dataset& data, TaskKind kind, std::uint64_t seed) const {
  if (!process_) process_ = std::make_shared<LearnerProcess>(command_);
  auto samples = nlohmann::json::array();
  for (std::size_t i = 0; i < data.x.size(); ++i) samples.push_back({{"x", data.x[i]}, {"y", data.y[i]}});
  const auto reply = process_->call({{"op", "fit"},
                                     {"kind", kind == TaskKind::Regression ? "regression" : "classification"},
                                     {"seed", seed},
                                     {"samples", samples}});
  if (!reply.contains("model_id")) throw Error("learner fit reply lacks 'model_id'");
  return std::make_unique<RemotePredictor>(process_, reply.at("model_id"));
}

std::string SubprocessLearner::name() const { return "subprocess:" + command_.front(); }

}  // namespace probagen
