// The OpenSSL-backed client is compiled in this translation unit only, so
// the rest of the library stays independent of the TLS toolchain.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <algorithm>
#include <cctype>

#include "refcheck/http.hpp"

namespace refcheck {

namespace {

struct ParsedUrl {
  bool https = true;
  std::string host;
  int port = 0;  // 0 = scheme default
  std::string path_and_query;
  bool valid = false;
};

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl parsed;
  std::string rest;
  if (url.rfind("https://", 0) == 0) {
    parsed.https = true;
    rest = url.substr(8);
  } else if (url.rfind("http://", 0) == 0) {
    parsed.https = false;
    rest = url.substr(7);
  } else {
    return parsed;
  }
  const std::size_t slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  parsed.path_and_query = slash == std::string::npos ? "/" : rest.substr(slash);
  const std::size_t colon = authority.find(':');
  if (colon != std::string::npos) {
    parsed.host = authority.substr(0, colon);
    try {
      parsed.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      return parsed;
    }
  } else {
    parsed.host = authority;
  }
  parsed.valid = !parsed.host.empty();
  return parsed;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

HttpResponse run_request(httplib::Client& client, const ParsedUrl& url,
                         const HttpHeaders& headers,
                         std::chrono::milliseconds timeout) {
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_follow_location(true);

  httplib::Headers request_headers;
  for (const auto& [name, value] : headers) {
    request_headers.emplace(name, value);
  }
  const httplib::Result result = client.Get(url.path_and_query, request_headers);

  HttpResponse response;
  if (!result) {
    response.error = httplib::to_string(result.error());
    return response;
  }
  response.status = result->status;
  response.body = result->body;
  for (const auto& [name, value] : result->headers) {
    response.headers[lower(name)] = value;
  }
  return response;
}

}  // namespace

HttpResponse LiveTransport::get(const std::string& url,
                                const HttpHeaders& headers,
                                std::chrono::milliseconds timeout) {
  const ParsedUrl parsed = parse_url(url);
  if (!parsed.valid) {
    HttpResponse response;
    response.error = "malformed url: " + url;
    return response;
  }
  std::string base = parsed.https ? "https://" : "http://";
  base += parsed.host;
  if (parsed.port != 0) base += ":" + std::to_string(parsed.port);
  httplib::Client client(base);
  return run_request(client, parsed, headers, timeout);
}

}  // namespace refcheck
