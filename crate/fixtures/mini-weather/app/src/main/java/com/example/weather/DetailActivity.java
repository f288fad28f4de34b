package com.example.weather;

import android.app.Activity;
import android.os.Bundle;
import android.widget.TextView;

import java.text.SimpleDateFormat;
import java.util.Date;
import java.util.Locale;

public class DetailActivity extends Activity {
    private TextView header;

    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.detail);
        header = findViewById(R.id.detail_header);
        final TextView updated = findViewById(R.id.detail_updated);
        String city = getIntent().getStringExtra(ForecastActivity.EXTRA_CITY);
        header.setText(city);
        SimpleDateFormat stamp = new SimpleDateFormat("yyyy-MM-dd", Locale.US);
        updated.setText(stamp.format(new Date()));
    }
}
