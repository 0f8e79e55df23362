//! Hand-written pages shared by the test suites.

#![allow(dead_code)]

use inferxpath_core::markup::parse_markup;
use inferxpath_core::{Corpus, Page};

pub const FIXTURE1_URL: &str = "http://example.test/people.html";

/// The Name/Address table page.
pub const FIXTURE1: &str = "<html><body><h1>People</h1><table><thead><th>Name</th><th>Address</th></thead>\
<tr><td>Alice</td><td>1 Main St</td></tr><tr><td>Bob</td><td>2 Oak Ave</td></tr></table></body></html>";

pub const FIXTURE2_A_URL: &str = "http://example.test/api/a.html";
pub const FIXTURE2_B_URL: &str = "http://example.test/api/b.html";

/// API documentation page: an article with a method, a parameter table, a
/// JSON sample and a link to the second page.
pub const FIXTURE2_A: &str = r#"<html><head><title>Users API</title></head><body>
<div id="content"><div class="article">
  <h1>Get user</h1>
  <p><span class="m">GET</span> <code>/users/{id}</code></p>
  <table class="parameters"><td>id</td><td>integer</td><td>User identifier</td></table>
  <pre>{"id": 42, "name": "Alice"}</pre>
  <p>See also <a href="b.html">list users</a>.</p>
</div></div>
<div class="footer"><p>Contact</p></div>
</body></html>"#;

pub const FIXTURE2_B: &str = r#"<html><head><title>Users API</title></head><body>
<div id="content"><div class="article">
  <h1>List users</h1>
  <p><span class="m">GET</span> <code>/users</code></p>
  <p>Back to <a href="a.html">get user</a>.</p>
</div></div>
</body></html>"#;

pub fn page(url: &str, src: &str) -> Page {
    Page::new(parse_markup(url, src).expect("fixture parses"))
}

pub fn fixture1() -> Corpus {
    let mut c = Corpus::new();
    c.insert(page(FIXTURE1_URL, FIXTURE1));
    c
}

/// Page a is the seed; page b is present but only reachable through the link.
pub fn fixture2() -> Corpus {
    let mut c = Corpus::new();
    c.insert(page(FIXTURE2_A_URL, FIXTURE2_A));
    c.insert_linked(page(FIXTURE2_B_URL, FIXTURE2_B));
    c
}
