#pragma once

#ifndef EPILAG_NO_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <string>

#include "epilag/errors.hpp"

namespace epilag {

inline bool is_remote_uri(const std::string& uri) {
  return uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0;
}

/// GET a CSV (or any body) over http(s). Returns the body on 200; any other
/// status raises HttpStatusError, transport failures raise NetworkError.
inline std::string fetch_remote_csv(const std::string& url) {
  if (!is_remote_uri(url)) throw NetworkError("not an http(s) URL: " + url);

  auto scheme_end = url.find("://") + 3;
  auto path_start = url.find('/', scheme_end);
  std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  client.set_follow_location(true);
  client.set_connection_timeout(30);
  client.set_read_timeout(60);

  auto res = client.Get(path);
  if (!res) throw NetworkError(httplib::to_string(res.error()) + " while fetching " + url);
  if (res->status != 200) throw HttpStatusError(res->status, url);
  return res->body;
}

}  // namespace epilag
