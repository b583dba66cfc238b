#ifndef CROSSDIFF_CERTIO_HPP
#define CROSSDIFF_CERTIO_HPP

#include <string>

#include "crossdiff/eigenproblem.hpp"
#include "crossdiff/steady.hpp"

namespace crossdiff {

// Certificates are serialized as self-describing JSON documents with every
// floating-point value rendered as a 17-significant-digit decimal string
// (bit-exact round trip). The content hash (FNV-1a 64) is computed over the
// canonical serialization with the timestamp and hash fields removed.

std::string fnv1a_hex(const std::string& data);

std::string steady_cert_to_json(const SteadyCertificate& cert);
SteadyCertificate steady_cert_from_json(const std::string& text);

std::string eigen_cert_to_json(const EigenCertificate& cert);
EigenCertificate eigen_cert_from_json(const std::string& text);

// Hash of a serialized certificate document (timestamp/hash stripped).
std::string cert_content_hash(const std::string& json_text);

std::string candidate_to_json(const SteadyCandidate& cand, double d, int m);
// Returns the candidate and fills d/m when present in the file.
SteadyCandidate candidate_from_json(const std::string& text, double* d = nullptr, int* m = nullptr);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace crossdiff

#endif
