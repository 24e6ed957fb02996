// Single-URL HTTP probing: bounded retries, explicit redirect following,
// HEAD-with-GET-fallback. Total over valid input: every outcome is encoded
// in CheckStatus, nothing throws for network reasons.
#pragma once

#include <iosfwd>
#include <string>

#include "sitecheck/model.hpp"
#include "sitecheck/url.hpp"

namespace sitecheck {

struct ProbePolicy {
  double timeout = 10.0; // seconds, per request
  int retries = 2;       // extra attempts after the first, for connection
                         // failures, timeouts, 429 and 503
  double backoff = 1.0;  // seconds between attempts
  int redirect_limit = 10;
  bool head_first = true; // false = GET only (original reachability behavior)
  std::string user_agent = "sitecheck/0.1.0 (+link-audit)";
};

// Builtin defaults with SITECHECK_TIMEOUT (seconds) applied when set.
ProbePolicy default_probe_policy();

// HEAD first (unless head_first is off), falling back to GET on 405/501 or a
// 5xx answer to HEAD. Worst-case wait per redirect hop is
// retries * (timeout + backoff) + timeout; the GET fallback adds requests
// only after the server answered, never after a timeout.
//
// stay_on: when given, following a redirect onto a different
// scheme/host/port than stay_on yields Skipped(external_not_checked)
// instead of continuing off-site.
CheckStatus probe(const NormalizedUrl& url, const ProbePolicy& policy,
                  const NormalizedUrl* stay_on = nullptr);

// GET with the same retry/redirect rules, returning the final body. Exactly
// one request per hop: callers that need the content must not probe first.
struct FetchResult {
  CheckStatus status;
  std::string body;         // final hop's body when status is ok/redirected
  std::string content_type; // Content-Type header, may be empty
  NormalizedUrl final_url;  // where the body came from, after redirects
};

FetchResult fetch(const NormalizedUrl& url, const ProbePolicy& policy,
                  const NormalizedUrl* stay_on = nullptr);

// `reach` semantics: 0 on Ok/Redirected, 1 otherwise, 2 on a malformed URL
// argument. Prints one line describing the outcome.
int check_reachable(const std::string& raw_url, const ProbePolicy& policy, std::ostream& out);

} // namespace sitecheck
