fn main() { println!("umt"); }
