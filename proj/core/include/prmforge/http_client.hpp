#pragma once

/**
 * OpenAI-compatible chat-completions client used for all three backend
 * roles. POSTs {endpoint}/chat/completions with model/messages/temperature/
 * top_p/n/max_tokens; bearer auth comes from PRMFORGE_API_KEY.
 *
 * PRM step scores have no wire standard; this client sends the problem and
 * steps as a JSON user message and expects the reply content to be a JSON
 * array of floats, one per step.
 *
 * The transport is injectable so retry, rate-limit, and concurrency behavior
 * are testable without sockets.
 */

#include <map>
#include <memory>
#include <string>

#include "prmforge/backends.hpp"

namespace prmforge {

struct HttpResponse {
  int status = 0;  // 0 = transport failure
  std::string body;
  std::string error;  // transport-level description when status == 0
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::map<std::string, std::string>& headers) = 0;
};

/// Real transport backed by cpp-httplib.
std::unique_ptr<Transport> make_httplib_transport(std::chrono::milliseconds timeout);

class ChatClient : public Completer, public StepScorer, public JudgeBackend {
 public:
  ChatClient(BackendConfig config, std::unique_ptr<Transport> transport);
  ~ChatClient() override;

  std::vector<std::string> complete(const std::string& prefix,
                                    const GenParams& params) override;
  std::vector<double> score_steps(const std::string& problem,
                                  const std::vector<std::string>& steps) override;
  std::string judge(const std::string& prompt) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace prmforge
