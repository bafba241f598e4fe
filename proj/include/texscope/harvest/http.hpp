#pragma once

// Live HTTP(S) transport over cpp-httplib.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include <chrono>
#include <string>

#include "texscope/error.hpp"
#include "texscope/harvest/client.hpp"

namespace texscope::harvest {

inline Transport http_transport(std::string user_agent, std::chrono::seconds timeout = std::chrono::seconds(60)) {
  return [user_agent = std::move(user_agent), timeout](const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidArgument, "not an absolute URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    auto res = client.Get(path, {{"User-Agent", user_agent}});
    if (!res) throw Error(ErrorCode::HttpError, "request to " + url + " failed: " + httplib::to_string(res.error()));

    HttpResponse out;
    out.status = res->status;
    out.body = std::move(res->body);
    out.content_type = res->get_header_value("Content-Type");
    const std::string retry = res->get_header_value("Retry-After");
    if (!retry.empty() && retry.find_first_not_of("0123456789") == std::string::npos) {
      out.retry_after = std::chrono::seconds(std::stoll(retry));
    }
    return out;
  };
}

}  // namespace texscope::harvest
