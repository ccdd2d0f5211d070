use statlab::analysis::{benjamini_hochberg, wilcoxon_signed_rank};

fn main() {
    let diffs = [0.12, 0.05, -0.02, 0.08, 0.11, 0.03, 0.07, -0.01, 0.09, 0.04];
    let w = wilcoxon_signed_rank(&diffs);
    println!("W+ {} statistic {} p {:.5} exact {}", w.w_plus, w.statistic, w.p_value, w.exact);
    println!("BH {:?}", benjamini_hochberg(&[0.01, 0.02, 0.03, 0.04, 0.5]).unwrap());
}
