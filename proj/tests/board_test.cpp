#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "foundry/board/notation.hpp"
#include "support/fixtures.hpp"
#include "support/naive_perft.hpp"

using namespace foundry;

namespace {

const char* kStart = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
const char* kMainPuzzle = "1r1r2k1/Q2p1R1p/2p2R2/1p3pB1/1P4q1/8/5K2/8 w";

Square sq(const char* name) { return *Square::parse(name); }

std::vector<std::string> highlighted_fens() {
  std::vector<std::string> out;
  for (const auto& h : fixtures::booklet()["highlighted"]) out.push_back(h["fen"]);
  return out;
}

// Positions reached by seeded random playouts from the start and from every fixture.
std::vector<Position> sampled_positions() {
  std::vector<std::string> roots = highlighted_fens();
  roots.push_back(kStart);
  roots.push_back("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1");
  std::mt19937_64 rng(7);
  std::vector<Position> out;
  for (const auto& fen : roots) {
    for (int game = 0; game < 12; ++game) {
      Position p = parse_fen(fen);
      for (int ply = 0; ply < 40; ++ply) {
        out.push_back(p);
        auto moves = legal_moves(p);
        if (moves.empty()) break;
        p = apply_move(p, moves[rng() % moves.size()]);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("parse_fen reads a board-and-side record") {
  Position p = parse_fen(kMainPuzzle);
  CHECK(p.side_to_move == Color::White);
  CHECK(p.at(sq("a7")) == Piece{Color::White, PieceKind::Queen});
  CHECK(p.at(sq("f7")) == Piece{Color::White, PieceKind::Rook});
  CHECK(p.at(sq("f6")) == Piece{Color::White, PieceKind::Rook});
  CHECK_FALSE(p.castling.any());
  CHECK_FALSE(p.en_passant);
  CHECK(p.halfmove_clock == 0);
  CHECK(p.fullmove_number == 1);
}

TEST_CASE("parse_fen accepts bare kings on a1 and h1") {
  Position p = parse_fen("8/8/8/8/8/8/8/K6k w - - 0 1");
  CHECK(king_square(p, Color::White) == sq("a1"));
  CHECK(king_square(p, Color::Black) == sq("h1"));
}

TEST_CASE("parse_fen rejects malformed records") {
  CHECK_THROWS_AS(parse_fen("9/8/8/8/8/8/8/8 w - - 0 1"), FenError);
  CHECK_THROWS_AS(parse_fen("8/8/8/8/8/8/8/K6k w -"), FenError);
  CHECK_THROWS_AS(parse_fen("8/8/8/8/8/8/8/K6x w - - 0 1"), FenError);
  CHECK_THROWS_AS(parse_fen("8/8/8/8/8/8/K6k w - - 0 1"), FenError);
  CHECK_THROWS_AS(parse_fen("8/8/8/8/8/8/8/K6k x - - 0 1"), FenError);
  CHECK_THROWS_AS(parse_fen("8/8/8/8/8/8/8/K6k w - - a 1"), FenError);
}

TEST_CASE("parse_fen names the violated invariant") {
  auto violations_of = [](const char* fen) {
    try {
      parse_fen(fen);
    } catch (const IllegalPositionError& e) {
      return e.violations();
    }
    return std::vector<Violation>{};
  };
  auto has = [](const std::vector<Violation>& v, Violation x) { return std::find(v.begin(), v.end(), x) != v.end(); };
  CHECK(has(violations_of("8/8/8/8/8/8/8/KK5k w"), Violation::MultipleKings));
  CHECK(has(violations_of("8/8/8/8/8/8/8/7k w"), Violation::MissingKing));
  CHECK(has(violations_of("P7/8/8/8/8/8/8/K6k w"), Violation::PawnOnBackRank));
  CHECK(has(violations_of("7k/8/8/8/8/8/8/K6R w"), Violation::OpponentInCheck));
  CHECK(has(violations_of("8/8/8/8/8/8/8/Kk6 w"), Violation::AdjacentKings));
  CHECK(has(violations_of("8/8/8/8/8/8/8/K6k w K - 0 1"), Violation::CastlingWithoutPieces));
  CHECK(has(violations_of("4k3/8/8/8/8/8/8/4K3 w - e6 0 1"), Violation::BadEnPassant));
}

TEST_CASE("serialize_fen round-trips the canonical six-field form") {
  const char* fen = "rnbqrbk1/pp3Rp1/2p1p1N1/3p1P1Q/3PnB2/2P5/PP3P1P/6K1 w - - 0 1";
  CHECK(serialize_fen(parse_fen(fen)) == fen);
  CHECK(serialize_fen(parse_fen("8/8/8/8/8/8/8/K6k w")) == "8/8/8/8/8/8/8/K6k w - - 0 1");
  CHECK(serialize_fen(parse_fen(kStart)) == kStart);
  CHECK(board_side_fen(parse_fen(kStart)) == "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w");
}

TEST_CASE("legal_moves on small positions") {
  CHECK(legal_moves(parse_fen("7k/8/8/8/8/8/8/K7 w")).size() == 3);
  CHECK(legal_moves(parse_fen(kStart)).size() == 20);
  auto moves = legal_moves(parse_fen(kMainPuzzle));
  CHECK(std::is_sorted(moves.begin(), moves.end()));
  CHECK(std::adjacent_find(moves.begin(), moves.end()) == moves.end());
}

TEST_CASE("perft matches known totals") {
  Position start = parse_fen(kStart);
  CHECK(perft(start, 1) == 20);
  CHECK(perft(start, 2) == 400);
  CHECK(perft(start, 3) == 8902);
  Position kiwipete = parse_fen("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1");
  CHECK(perft(kiwipete, 1) == 48);
  CHECK(perft(kiwipete, 2) == 2039);
  CHECK(perft(kiwipete, 3) == 97862);
  CHECK(perft(parse_fen("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1"), 3) == 2812);
}

TEST_CASE("perft matches the brute-force oracle on the highlighted puzzles") {
  for (const auto& fen : highlighted_fens()) {
    Position p = parse_fen(fen);
    for (int d = 1; d <= 3; ++d) {
      INFO(fen << " depth " << d);
      CHECK(perft(p, d) == naive::perft(serialize_fen(p), d));
    }
  }
  // The oracle also handles castling and en passant.
  CHECK(naive::perft(kStart, 3) == 8902);
  CHECK(naive::perft("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1", 2) == 2039);
}

TEST_CASE("a printed mating line ends in checkmate") {
  Position p = parse_fen("5b1r/k2rqP2/BRR5/4P1p1/1n1N3p/8/3K1Q1P/1r6 w");
  std::vector<std::string> line = {"Rb7+", "Rxb7", "Nb5+", "Kb8", "Qa7+", "Rxa7", "Rc8#"};
  Position end = play_line(p, parse_san_line(p, line));
  CHECK(legal_moves(end).empty());
  CHECK(in_check(end));
  CHECK(game_state(end) == GameState::Checkmate);
}

TEST_CASE("the rook check leaves both rooks hanging") {
  Position p = parse_fen(kMainPuzzle);
  Position after = apply_move(p, Move{sq("f6"), sq("g6"), std::nullopt});
  CHECK(after.side_to_move == Color::Black);
  CHECK(king_square(after, Color::Black) == sq("g8"));
  CHECK(in_check(after));
  CHECK(attackers(after, sq("g6"), Color::White).empty());
  CHECK(attackers(after, sq("f7"), Color::White).empty());
  CHECK_FALSE(attackers(after, sq("g6"), Color::Black).empty());
  CHECK_FALSE(attackers(after, sq("f7"), Color::Black).empty());
  CHECK(p == parse_fen(kMainPuzzle));
}

TEST_CASE("apply_move rejects illegal moves") {
  Position p = parse_fen(kMainPuzzle);
  CHECK_THROWS_AS(apply_move(p, Move{sq("a7"), sq("h7"), std::nullopt}), IllegalMoveError);
  CHECK_THROWS_AS(apply_move(p, Move{sq("e4"), sq("e5"), std::nullopt}), IllegalMoveError);
}

TEST_CASE("a quiet king move and its reversal restore the board") {
  Position p = parse_fen("4k3/8/8/8/8/8/8/4K3 w");
  Position q = apply_move(apply_move(p, Move{sq("e1"), sq("d1"), std::nullopt}), Move{sq("e8"), sq("d8"), std::nullopt});
  q = apply_move(apply_move(q, Move{sq("d1"), sq("e1"), std::nullopt}), Move{sq("d8"), sq("e8"), std::nullopt});
  CHECK(q.board == p.board);
  CHECK(q.halfmove_clock == 4);
  CHECK(q.fullmove_number == 3);
}

TEST_CASE("clocks, castling rights and en passant update") {
  Position p = parse_fen(kStart);
  p = apply_move(p, parse_san(p, "e4"));
  CHECK_FALSE(p.en_passant);  // no black pawn can take
  p = apply_move(p, parse_san(p, "d5"));
  p = apply_move(p, parse_san(p, "e5"));
  p = apply_move(p, parse_san(p, "f5"));
  CHECK(p.en_passant == sq("f6"));
  Move ep = parse_san(p, "exf6");
  CHECK(move_flags(p, ep).en_passant);
  Position q = apply_move(p, ep);
  CHECK_FALSE(q.at(sq("f5")));
  CHECK(q.halfmove_clock == 0);

  Position c = parse_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 3 10");
  Position castled = apply_move(c, parse_san(c, "O-O"));
  CHECK(castled.at(sq("f1")) == Piece{Color::White, PieceKind::Rook});
  CHECK(castled.at(sq("g1")) == Piece{Color::White, PieceKind::King});
  CHECK_FALSE(castled.castling.white_king);
  CHECK_FALSE(castled.castling.white_queen);
  CHECK(castled.castling.black_king);
  CHECK(castled.halfmove_clock == 4);
  Position rook_taken = apply_move(c, parse_san(c, "Rxa8+"));
  CHECK_FALSE(rook_taken.castling.black_queen);
  CHECK_FALSE(rook_taken.castling.white_queen);
}

TEST_CASE("game_state classifies terminal positions") {
  Position p = parse_fen("6rk/Q7/3q4/5p2/2PP1P2/P5Pr/7P/R4RK1 b");
  std::vector<std::string> line = {"Rxh2", "Kxh2", "Qh6+", "Kg2", "Qh4", "Rf3", "Rxg3+", "Rxg3", "Qh2+", "Kf3", "Qe2+", "Kxe2"};
  Position end = play_line(p, parse_san_line(p, line));
  CHECK(game_state(end) == GameState::Stalemate);
  CHECK(game_state(parse_fen(kStart)) == GameState::Ongoing);
  CHECK(game_state(parse_fen("8/8/8/3k4/8/8/2B5/4K3 w")) == GameState::InsufficientMaterial);
  CHECK(game_state(parse_fen("8/8/8/3k4/8/8/2N5/4K3 b")) == GameState::InsufficientMaterial);
  CHECK(game_state(parse_fen("8/8/8/3k4/8/8/2NN4/4K3 b")) == GameState::Ongoing);
}

TEST_CASE("material_balance") {
  CHECK(material_balance(parse_fen("7k/8/8/8/8/8/8/K7 w")) == 0);
  CHECK(material_balance(parse_fen("7k/7r/8/8/8/8/8/KQ6 w")) == 400);
  CHECK(material_balance(parse_fen("7k/7r/8/8/8/8/8/KQ6 b")) == -400);

  // Independent count straight off the FEN text.
  std::string fen = fixtures::booklet()["highlighted"][3]["fen"];
  int expected = 0;
  for (char c : fen.substr(0, fen.find(' '))) {
    int v = 0;
    switch (std::tolower(c)) {
      case 'p': v = 100; break;
      case 'n': v = 320; break;
      case 'b': v = 330; break;
      case 'r': v = 500; break;
      case 'q': v = 900; break;
      default: break;
    }
    expected += std::isupper(c) ? v : -v;
  }
  Position p = parse_fen(fen);
  CHECK(material_balance(p) == (p.side_to_move == Color::White ? expected : -expected));
}

TEST_CASE("validate_realism") {
  CHECK(validate_realism(parse_fen(kMainPuzzle)).empty());
  auto two_kings = validate_realism(parse_fen_unchecked("8/8/8/8/8/8/8/KK5k w"));
  CHECK(std::find(two_kings.begin(), two_kings.end(), Violation::MultipleKings) != two_kings.end());

  auto promo = validate_realism(parse_fen("QQQ5/7k/8/8/8/8/PPPPPPP1/K7 w"));
  CHECK(promo == std::vector<Violation>{Violation::PromotionInconsistent});
  CHECK(validate_realism(parse_fen("QQQ5/7k/8/8/8/8/PPPPPP2/K7 w")).empty());
  // Two bishops on the same square colour need a promotion.
  CHECK(validate_realism(parse_fen("B1B4k/8/8/8/8/8/PPPPPPPP/K7 w")) == std::vector<Violation>{Violation::PromotionInconsistent});
  CHECK(validate_realism(parse_fen_unchecked("7k/8/8/8/8/8/PPPPPPPP/KP6 w")) ==
        std::vector<Violation>{Violation::PawnOnBackRank, Violation::TooManyPawns});

  // The chaotic evolutionary position is count-consistent: 3 extras against 4
  // missing pawns for white, 3 against 7 for black.
  CHECK(validate_realism(parse_fen("1R2Q1r1/P2nP2r/bP3QnB/R1R3P1/3b3r/6K1/1k3pbR/5b2 b")).empty());
}

TEST_CASE("SAN formatting and parsing") {
  Position p = parse_fen(kMainPuzzle);
  CHECK(to_san(p, Move{sq("f6"), sq("g6"), std::nullopt}) == "Rg6+");
  CHECK(parse_san(p, "Rg6+!") == Move{sq("f6"), sq("g6"), std::nullopt});
  CHECK(parse_san(p, "Rfg6") == Move{sq("f6"), sq("g6"), std::nullopt});
  CHECK(parse_san(p, "R6g6") == Move{sq("f6"), sq("g6"), std::nullopt});
  CHECK_THROWS_AS(parse_san(p, "Nf3"), NotationError);
  CHECK_THROWS_AS(parse_san(p, "Zz9"), NotationError);

  Position r = parse_fen("3k4/8/8/8/8/8/4K3/R6R w");
  CHECK(to_san(r, parse_san(r, "Rab1")) == "Rab1");
  CHECK_THROWS_AS(parse_san(r, "Rb1"), NotationError);
  Position c = parse_fen("3k4/8/8/8/8/8/8/R3K2R w K - 0 1");
  CHECK(to_san(c, parse_san(c, "0-0")) == "O-O");
  CHECK_THROWS_AS(parse_san(c, "O-O-O"), NotationError);

  Position promo = parse_fen("7k/1P6/8/8/8/8/8/K7 w");
  CHECK(to_san(promo, parse_san(promo, "b8=N")) == "b8=N");
  CHECK(parse_san(promo, "b8Q").promotion == PieceKind::Queen);
  CHECK(to_san(promo, parse_san(promo, "b8")) == "b8=Q+");

  CHECK(parse_uci(p, "f6g6") == Move{sq("f6"), sq("g6"), std::nullopt});
  CHECK_THROWS_AS(parse_uci(p, "f6f8"), NotationError);
  CHECK(parse_uci(promo, "b7b8r").promotion == PieceKind::Rook);
}

TEST_CASE("tokenize_line strips numbering and results") {
  auto t = tokenize_line("1. Rg6+! hxg6 2.Qa1 Kxf7 3... Qf6+ Kg8. 1-0");
  CHECK(t == std::vector<std::string>{"Rg6+!", "hxg6", "Qa1", "Kxf7", "Qf6+", "Kg8"});
}

TEST_CASE("highlighted solution lines are legal") {
  for (const auto& h : fixtures::booklet()["highlighted"]) {
    Position p = parse_fen(h["fen"].get<std::string>());
    auto line = h["line"].get<std::vector<std::string>>();
    INFO(h["fen"].get<std::string>());
    CHECK_NOTHROW(parse_san_line(p, line));
    CHECK(parse_san(p, h["key"].get<std::string>()) == parse_san(p, line.front()));
  }
}

TEST_CASE("property: round trip, legality closure, terminal consistency, antisymmetry") {
  auto positions = sampled_positions();
  REQUIRE(positions.size() > 1000);
  for (const auto& p : positions) {
    CHECK(parse_fen(serialize_fen(p)) == p);
    for (const auto& m : legal_moves(p)) {
      Position next = apply_move(p, m);
      if (!structural_violations(next).empty()) {
        FAIL_CHECK(serialize_fen(p) << " " << m.uci());
      }
    }
    auto state = game_state(p);
    if (state == GameState::Checkmate) CHECK((legal_moves(p).empty() && in_check(p)));
    if (state == GameState::Stalemate) CHECK((legal_moves(p).empty() && !in_check(p)));
    Position flipped = p;
    flipped.side_to_move = opposite(p.side_to_move);
    CHECK(material_balance(p) == -material_balance(flipped));
  }
}

TEST_CASE("property: SAN round trip over sampled positions") {
  auto positions = sampled_positions();
  for (size_t i = 0; i < positions.size(); i += 7) {
    const auto& p = positions[i];
    for (const auto& m : legal_moves(p)) {
      CHECK(parse_san(p, to_san(p, m)) == m);
      CHECK(parse_uci(p, m.uci()) == m);
    }
  }
}
