#include <gtest/gtest.h>

#include <thread>

#include "orgym/e2/codec.hpp"
#include "orgym/e2/framing.hpp"
#include "orgym/e2/transport.hpp"
#include "support.hpp"

using namespace orgym;
using namespace orgym::e2;

namespace {

const std::filesystem::path kVectors = ORGYM_VECTOR_DIR;
const std::string kNode = "gnb:311-048-01000501";

DecodeError::Kind decode_kind(const std::vector<std::uint8_t>& bytes) {
  try {
    decode(bytes);
  } catch (const DecodeError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decoded";
  return DecodeError::Kind::InvalidValue;
}

/// In-memory stream over a fixed byte string, delivered in small chunks.
class ScriptedStream : public ByteStream {
 public:
  explicit ScriptedStream(std::vector<std::uint8_t> data, std::size_t chunk = 3)
      : data_(std::move(data)), chunk_(chunk) {}

  std::size_t read_some(std::span<std::uint8_t> buf) override {
    auto n = std::min({buf.size(), chunk_, data_.size() - pos_});
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(pos_), n, buf.begin());
    pos_ += n;
    read_total_ = pos_;
    return n;
  }
  void write_all(std::span<const std::uint8_t>) override {}
  void close() override {}

  std::size_t read_total() const { return read_total_; }

 private:
  std::vector<std::uint8_t> data_;
  std::size_t chunk_;
  std::size_t pos_ = 0;
  std::size_t read_total_ = 0;
};

}  // namespace

TEST(Codec, RoundTripEveryVariant) {
  test::Rng rng(2024);
  for (std::size_t variant = 0; variant < 7; ++variant) {
    for (int i = 0; i < 10000; ++i) {
      auto m = test::random_message(rng, variant);
      auto bytes = encode(m);
      auto back = decode(bytes);
      ASSERT_EQ(back, m) << "variant " << variant << " sample " << i;
      ASSERT_EQ(encode(back), bytes);
    }
  }
}

TEST(Codec, GoldenSetupResponse) {
  EXPECT_EQ(encode(E2SetupResponse{true}), (std::vector<std::uint8_t>{0x00, 0x00, 0x00, 0x02, 0x02, 0x01}));
}

TEST(Codec, GoldenVectors) {
  const auto cases = test::golden_messages();
  for (const auto& [name, msg] : cases) {
    auto golden = test::read_hex(kVectors / (name + ".hex"));
    ASSERT_FALSE(golden.empty()) << name;
    EXPECT_EQ(encode(msg), golden) << name;
    EXPECT_EQ(decode(golden), msg) << name;
  }
}

TEST(Codec, ErrorKinds) {
  EXPECT_EQ(decode_kind({0, 0, 0, 1, 99}), DecodeError::Kind::UnknownType);
  EXPECT_EQ(decode_kind({0, 0, 0, 10, 2, 1}), DecodeError::Kind::Truncated);
  EXPECT_EQ(decode_kind({0, 0, 0}), DecodeError::Kind::Truncated);
  EXPECT_EQ(decode_kind({0, 0, 0, 2, 2, 1, 0}), DecodeError::Kind::TrailingBytes);
  EXPECT_EQ(decode_kind({0, 0, 0, 3, 2, 1, 0}), DecodeError::Kind::TrailingBytes);  // inside the payload
  EXPECT_EQ(decode_kind({0xFF, 0xFF, 0xFF, 0xFF, 2, 1}), DecodeError::Kind::LengthOverflow);
  EXPECT_EQ(decode_kind({0, 0, 0, 2, 2, 7}), DecodeError::Kind::InvalidValue);
  EXPECT_EQ(decode_kind({0, 0, 0, 6, 7, 0, 0, 0, 7, 0}), DecodeError::Kind::Truncated);
}

TEST(Codec, EncodeRefusesWhatCannotRoundTrip) {
  EXPECT_THROW(encode(RicSubscriptionResponse{0, true}), EncodeError);
  E2SetupRequest big{std::string(70000, 'x'), {}};
  EXPECT_THROW(encode(big), EncodeError);
}

TEST(Codec, FuzzNeverCrashes) {
  test::Rng rng(99);
  std::vector<std::vector<std::uint8_t>> seeds;
  for (std::size_t v = 0; v < 7; ++v) seeds.push_back(encode(test::random_message(rng, v)));
  std::size_t decoded = 0;
  for (int i = 0; i < 100000; ++i) {
    std::vector<std::uint8_t> input;
    if (i % 2 == 0) {
      input.resize(test::uniform(rng, 0, 64));
      for (auto& b : input) b = static_cast<std::uint8_t>(test::uniform(rng, 0, 255));
      if (input.size() >= 5 && i % 4 == 0) {
        // Plausible header so the payload parser gets exercised.
        const auto len = input.size() - 4;
        input[0] = 0, input[1] = 0, input[2] = static_cast<std::uint8_t>(len >> 8),
        input[3] = static_cast<std::uint8_t>(len);
        input[4] = static_cast<std::uint8_t>(test::uniform(rng, 1, 7));
      }
    } else {
      input = seeds[test::uniform(rng, 0, seeds.size() - 1)];
      for (auto flips = test::uniform(rng, 1, 4); flips > 0; --flips) {
        input[test::uniform(rng, 0, input.size() - 1)] ^= static_cast<std::uint8_t>(test::uniform(rng, 1, 255));
      }
      if (test::uniform(rng, 0, 3) == 0) input.resize(test::uniform(rng, 0, input.size()));
    }
    try {
      auto m = decode(input);
      // Anything accepted must be canonical.
      ASSERT_EQ(encode(m), input);
      ++decoded;
    } catch (const DecodeError&) {
    }
  }
  EXPECT_GT(decoded, 0u);
}

TEST(Framing, SplitsConcatenatedFramesInOrder) {
  test::Rng rng(7);
  std::vector<E2Message> msgs;
  std::vector<std::uint8_t> wire;
  for (int i = 0; i < 200; ++i) {
    msgs.push_back(test::random_message(rng, test::uniform(rng, 0, 6)));
    auto b = encode(msgs.back());
    wire.insert(wire.end(), b.begin(), b.end());
  }
  ScriptedStream stream(wire, 5);
  for (const auto& m : msgs) EXPECT_EQ(from_frame(read_frame(stream)), m);
  EXPECT_THROW(read_frame(stream), ConnectionClosed);
}

TEST(Framing, EofInsideFrameIsProtocolError) {
  auto bytes = encode(RicSubscriptionRequest{7, kNode, 250});
  for (std::size_t cut = 1; cut < bytes.size(); ++cut) {
    ScriptedStream stream({bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut)});
    EXPECT_THROW(read_frame(stream), ProtocolError) << cut;
  }
}

TEST(Framing, LengthCapCheckedBeforeBuffering) {
  std::vector<std::uint8_t> bytes = {0x00, 0x10, 0x00, 0x01, 2, 1, 2, 3};
  ScriptedStream stream(bytes, 64);
  EXPECT_THROW(read_frame(stream), ProtocolError);
  EXPECT_EQ(stream.read_total(), 4u);
}

class TransportTest : public ::testing::TestWithParam<std::string> {};

TEST_P(TransportTest, DuplexExchangeAndClose) {
  auto listener = listen_on(GetParam());
  const auto endpoint = listener->endpoint();
  std::thread server([&] {
    auto s = listener->accept();
    ASSERT_TRUE(s);
    Connection conn(std::move(s));
    for (;;) {
      try {
        conn.send(conn.receive());
      } catch (const ConnectionClosed&) {
        break;
      }
    }
  });
  {
    Connection client(connect_to(endpoint));
    test::Rng rng(1);
    for (int i = 0; i < 100; ++i) {
      auto m = test::random_message(rng, test::uniform(rng, 0, 6));
      client.send(m);
      EXPECT_EQ(client.receive(), m);
    }
    client.close();
  }
  server.join();
  listener->close();
  EXPECT_EQ(listener->accept(), nullptr);
}

TEST_P(TransportTest, CloseUnblocksReader) {
  auto listener = listen_on(GetParam());
  auto client = connect_to(listener->endpoint());
  auto server = listener->accept();
  std::thread reader([&] {
    std::uint8_t buf[8];
    EXPECT_EQ(server->read_some(buf), 0u);
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  client->close();
  reader.join();
}

INSTANTIATE_TEST_SUITE_P(Endpoints, TransportTest, ::testing::Values("127.0.0.1:0", "inproc://transport-test"),
                         [](const auto& info) { return info.index == 0 ? std::string("Tcp") : std::string("Inproc"); });

TEST(Transport, RefusedWhenNothingListens) {
  EXPECT_THROW(connect_to("inproc://nobody-home"), ConnectionRefused);
  auto l = listen_on("127.0.0.1:0");
  auto ep = l->endpoint();
  l->close();
  l.reset();
  EXPECT_THROW(connect_to(ep), ConnectionRefused);
}
