#include "sitecheck/probe.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace sitecheck {

namespace {

struct HopReply {
  bool got_response = false;
  httplib::Error net_error = httplib::Error::Success;
  int status = 0;
  std::string location;
  std::string content_type;
  std::string body;
};

BrokenReason reason_for(httplib::Error err) {
  switch (err) {
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::Read:
    case httplib::Error::Write:
      return BrokenReason::timeout;
    default:
      return BrokenReason::connection_failed;
  }
}

HopReply request_once(const NormalizedUrl& url, const ProbePolicy& policy, bool use_get,
                      bool want_body) {
  httplib::Client cli(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
  auto whole = static_cast<time_t>(policy.timeout);
  auto frac = static_cast<time_t>((policy.timeout - static_cast<double>(whole)) * 1e6);
  cli.set_connection_timeout(whole, frac);
  cli.set_read_timeout(whole, frac);
  cli.set_write_timeout(whole, frac);
  cli.set_follow_location(false);
  cli.set_default_headers({{"User-Agent", policy.user_agent}});

  std::string path = url.path;
  if (url.query) path += "?" + *url.query;

  httplib::Result res = use_get ? cli.Get(path) : cli.Head(path);
  HopReply reply;
  if (!res) {
    reply.net_error = res.error();
    return reply;
  }
  reply.got_response = true;
  reply.status = res->status;
  reply.location = res->get_header_value("Location");
  reply.content_type = res->get_header_value("Content-Type");
  if (use_get && want_body) reply.body = std::move(res->body);
  return reply;
}

bool head_should_fall_back(int status) {
  return status == 405 || status == 501 || status >= 500;
}

bool retryable_status(int status) { return status == 429 || status == 503; }

FetchResult perform(const NormalizedUrl& url, const ProbePolicy& policy, bool want_body,
                    const NormalizedUrl* stay_on) {
  FetchResult out;
  NormalizedUrl current = url;
  std::vector<NormalizedUrl> chain;

  for (;;) {
    bool use_get = want_body || !policy.head_first;
    HopReply reply;
    BrokenReason net_reason = BrokenReason::connection_failed;

    for (int attempt = 0; attempt <= policy.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(policy.backoff));
      }
      reply = request_once(current, policy, use_get, want_body);
      if (!reply.got_response) {
        net_reason = reason_for(reply.net_error);
        continue;
      }
      if (!use_get && head_should_fall_back(reply.status)) {
        use_get = true; // the server answered; one follow-up GET, kept for
                        // the rest of this hop's attempts
        reply = request_once(current, policy, use_get, want_body);
        if (!reply.got_response) {
          net_reason = reason_for(reply.net_error);
          continue;
        }
      }
      if (retryable_status(reply.status)) continue;
      break;
    }

    if (!reply.got_response) {
      out.status = CheckStatus::broken(net_reason);
      return out;
    }

    int status = reply.status;
    if (status >= 200 && status < 300) {
      out.status = chain.empty() ? CheckStatus::ok(status)
                                 : CheckStatus::redirected(chain, status);
      out.body = std::move(reply.body);
      out.content_type = reply.content_type;
      out.final_url = current;
      return out;
    }
    if (status >= 300 && status < 400) {
      if (reply.location.empty()) {
        // a redirect that points nowhere cannot be followed or trusted
        out.status = CheckStatus::broken(BrokenReason::connection_failed);
        return out;
      }
      UrlError err = UrlError::none;
      auto next = normalize_url(&current, reply.location, &err);
      if (!next) {
        out.status = err == UrlError::unsupported_scheme
                         ? CheckStatus::skipped(SkipReason::scheme_unsupported)
                         : CheckStatus::broken(BrokenReason::invalid_url);
        return out;
      }
      if (*next == current || *next == url ||
          std::find(chain.begin(), chain.end(), *next) != chain.end()) {
        out.status = CheckStatus::broken(BrokenReason::too_many_redirects);
        return out;
      }
      if (stay_on && classify_scope(*stay_on, *next) == Scope::external) {
        chain.push_back(*next);
        out.status = CheckStatus::skipped(SkipReason::external_not_checked);
        out.status.redirect_chain = std::move(chain);
        return out;
      }
      chain.push_back(*next);
      if (static_cast<int>(chain.size()) > policy.redirect_limit) {
        out.status = CheckStatus::broken(BrokenReason::too_many_redirects);
        return out;
      }
      current = *next;
      continue;
    }
    if (status >= 400 && status < 600) {
      out.status = CheckStatus::broken_http(status);
      return out;
    }
    // 1xx after httplib's own continue handling: not a usable answer
    out.status = CheckStatus::broken(BrokenReason::connection_failed);
    return out;
  }
}

} // namespace

ProbePolicy default_probe_policy() {
  ProbePolicy policy;
  if (const char* env = std::getenv("SITECHECK_TIMEOUT")) {
    char* end = nullptr;
    double t = std::strtod(env, &end);
    if (end != env && *end == '\0' && t > 0) policy.timeout = t;
  }
  return policy;
}

CheckStatus probe(const NormalizedUrl& url, const ProbePolicy& policy,
                  const NormalizedUrl* stay_on) {
  return perform(url, policy, false, stay_on).status;
}

FetchResult fetch(const NormalizedUrl& url, const ProbePolicy& policy,
                  const NormalizedUrl* stay_on) {
  return perform(url, policy, true, stay_on);
}

int check_reachable(const std::string& raw_url, const ProbePolicy& policy, std::ostream& out) {
  UrlError err = UrlError::none;
  auto url = normalize_url(nullptr, raw_url, &err);
  if (!url) {
    out << "not a checkable URL: " << raw_url << "\n";
    return 2;
  }
  CheckStatus status = probe(*url, policy);
  if (status.is_ok()) {
    out << url->str() << " is reachable: " << status.describe() << "\n";
    return 0;
  }
  out << url->str() << " is unreachable: " << status.describe() << "\n";
  return 1;
}

} // namespace sitecheck
