//! Split an HTML fragment into classified tokens.
//!
//! ```text
//! cargo run --example tokenize -- '<UL><LI>Congo 242'
//! ```

use fuzzwrap::tokenize;

fn main() {
    let html = std::env::args().nth(1).unwrap_or_else(|| "<UL><LI><B>Congo</B> : <I>242</I>\n".into());
    for token in tokenize(&html) {
        println!("{:>4}..{:<4} {:<6} {:?}", token.span.start, token.span.end, token.class.label(), token.lexeme);
    }
}
