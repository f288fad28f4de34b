package com.example.weather;

import android.app.Activity;
import android.content.Intent;
import android.os.Bundle;
import android.view.View;
import android.widget.ProgressBar;
import android.widget.TextView;

/**
 * Shows today's forecast. A comment mentioning findViewById(R.id.nothing)
 * or reader.close(); must not produce call sites.
 */
public class ForecastActivity extends Activity {
    static final String EXTRA_CITY = "city";

    private TextView summary;
    private ProgressBar spinner;
    private String city = "Lisbon";

    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.forecast);
        summary = (TextView) findViewById(R.id.forecast_summary);
        spinner = (ProgressBar)
                findViewById(R.id.forecast_spinner);
        spinner.setVisibility(View.GONE);
        summary.setOnClickListener(this::openDetail);
        findViewById(R.id.forecast_refresh).setOnClickListener(null);
        String label = "setOnClickListener(new Listener())";
        summary.setContentDescription(label);
    }

    void showLoading() {
        spinner.setVisibility(View.INVISIBLE);
    }

    private void openDetail(View v) {
        Intent detail = new Intent(this, DetailActivity.class);
        detail.putExtra(EXTRA_CITY, city);
        detail.putExtra("units", "metric");
        detail.putExtra("verbose", null);
        startActivity(detail);
    }
}
